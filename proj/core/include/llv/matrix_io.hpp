#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "llv/taskgen.hpp"

namespace llv::io {

// Text matrix file: a header line "<rows> <cols>", then one line per row of
// space-separated values. Values use shortest round-trip formatting.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

/// Metadata carried in the header of a dumped prompt split.
struct PromptFileHeader {
  std::size_t count = 0;
  std::size_t seq_len = 0;
  std::size_t hidden_width = 0;
  std::uint64_t seed = 0;
  std::uint64_t spec_hash = 0;
};

// Prompt split file: header "<count> <T> <H> <seed> <spec_hash>", then one line
// per prompt: "<label> v(0,0) v(0,1) ... v(T-1,H-1)" in row-major order.
void write_prompts(std::ostream& out, const PromptSet& prompts, std::uint64_t seed,
                   std::uint64_t spec_hash);
PromptSet read_prompts(std::istream& in, PromptFileHeader* header = nullptr);

/// Writes `content` to `path` via a sibling temp file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace llv::io
