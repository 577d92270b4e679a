// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "limor/projection.hpp"

namespace limor
{

// Matrix Market "matrix" files: coordinate or array, real/integer, general/symmetric/skew-symmetric.
Mat read_matrix_market(const std::string &path);
// Writes the dense array format with round-trip precision (atomic).
void write_matrix_market(const std::string &path, const Mat &M);

///
/// Loads a model from
///   - a JSON bundle {"A": [[...]], "B": [[...]], "C": [[...]]} (row-major nested arrays, or
///     {"rows": r, "cols": c, "data": [...]}),
///   - a JSON manifest {"A": "a.mtx", "B": "b.mtx", "C": "c.mtx"} (paths relative to the manifest),
///   - a comma-separated triple "a.mtx,b.mtx,c.mtx".
///
StateSpaceModel load_model(const std::string &source, bool require_stable = true);

struct RomBundle
{
  StateSpaceModel rom;
  std::optional<ProjectionPair> pair;  // "V" and "W" when present
};

// A JSON bundle as written by save_rom; unstable ROMs are accepted.
RomBundle load_rom(const std::string &path);
void save_rom(const std::string &path, const StateSpaceModel &rom, const ProjectionPair *pair = nullptr);

// Writes to a temporary sibling file, then renames over `path`.
void atomic_write(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

}  // namespace limor
