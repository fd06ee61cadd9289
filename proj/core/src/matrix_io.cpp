#include "llv/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "llv/error.hpp"
#include "llv/format.hpp"

namespace llv::io {

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw InvalidArgument(std::string("truncated matrix file: expected ") + what);
  return tok;
}

std::size_t next_size(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(tok, &pos);
  if (pos != tok.size()) throw InvalidArgument("bad integer '" + tok + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = static_cast<Eigen::Index>(next_size(in, "rows"));
  const auto cols = static_cast<Eigen::Index>(next_size(in, "cols"));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_double(next_token(in, "value"));
  return m;
}

void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ostringstream out;
  write_matrix(out, m);
  write_text_file(path, out.str());
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_matrix(in);
}

void write_prompts(std::ostream& out, const PromptSet& prompts, std::uint64_t seed,
                   std::uint64_t spec_hash) {
  const Eigen::Index T = prompts.empty() ? 0 : prompts.front().embedding.rows();
  const Eigen::Index H = prompts.empty() ? 0 : prompts.front().embedding.cols();
  out << prompts.size() << ' ' << T << ' ' << H << ' ' << seed << ' ' << spec_hash << '\n';
  for (const auto& p : prompts) {
    if (p.embedding.rows() != T || p.embedding.cols() != H)
      throw InvalidArgument("prompt set has ragged embeddings");
    out << p.label;
    for (Eigen::Index r = 0; r < T; ++r)
      for (Eigen::Index c = 0; c < H; ++c) out << ' ' << format_double(p.embedding(r, c));
    out << '\n';
  }
}

PromptSet read_prompts(std::istream& in, PromptFileHeader* header) {
  PromptFileHeader h;
  h.count = next_size(in, "count");
  h.seq_len = next_size(in, "seq_len");
  h.hidden_width = next_size(in, "hidden_width");
  h.seed = next_size(in, "seed");
  h.spec_hash = next_size(in, "spec_hash");
  PromptSet out;
  out.reserve(h.count);
  for (std::size_t i = 0; i < h.count; ++i) {
    LabeledPrompt p;
    p.label = static_cast<int>(next_size(in, "label"));
    if (p.label != 0 && p.label != 1) throw InvalidArgument("prompt label must be 0 or 1");
    p.embedding.resize(static_cast<Eigen::Index>(h.seq_len), static_cast<Eigen::Index>(h.hidden_width));
    for (Eigen::Index r = 0; r < p.embedding.rows(); ++r)
      for (Eigen::Index c = 0; c < p.embedding.cols(); ++c)
        p.embedding(r, c) = parse_double(next_token(in, "value"));
    out.push_back(std::move(p));
  }
  if (header) *header = h;
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace llv::io
