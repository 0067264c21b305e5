#include "l1h/matrix_io.hpp"

#include "l1h/error.hpp"

#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace l1h {

namespace {

constexpr char kMatrixMagic[8] = {'L', '1', 'H', 'M', 'A', 'T', '0', '0'};
constexpr char kStateMagic[8] = {'L', '1', 'H', 'S', 'T', 'A', 'T', 'E'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  if (at + 8 > in.size()) raise(ErrorCode::Io, "truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(ErrorCode::Io, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise(ErrorCode::Io, "cannot rename onto " + path);
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& field : split(line, ',')) {
      const std::string f = trim(field);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        raise(ErrorCode::Io, path + ":" + std::to_string(line_no) + ": bad number '" + f + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      raise(ErrorCode::Io, path + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(ErrorCode::Io, path + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::string out;
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

std::string encode_matrix(const Matrix& m) {
  std::string out(kMatrixMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  out.reserve(out.size() + 8 * static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
  }
  return out;
}

Matrix decode_matrix(const std::string& bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kMatrixMagic, 8) != 0) {
    raise(ErrorCode::Io, "missing matrix magic");
  }
  const std::uint64_t rows = get_u64(bytes, 8);
  const std::uint64_t cols = get_u64(bytes, 16);
  if (rows != 0 && cols > (bytes.size() - 24) / 8 / rows) raise(ErrorCode::Io, "matrix payload truncated");
  if (bytes.size() != 24 + 8 * rows * cols) raise(ErrorCode::Io, "matrix payload has wrong size");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t at = 24;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j, at += 8) m(i, j) = std::bit_cast<double>(get_u64(bytes, at));
  }
  return m;
}

Matrix read_matrix_binary(const std::string& path) { return decode_matrix(read_file(path)); }

void write_matrix_binary(const std::string& path, const Matrix& m) {
  write_file_atomic(path, encode_matrix(m));
}

Matrix read_matrix(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kMatrixMagic, 8) == 0) return decode_matrix(bytes);
  return read_matrix_csv(path);
}

void write_container(const std::string& path, const SectionMap& sections) {
  std::string out(kStateMagic, 8);
  put_u64(out, sections.size());
  std::vector<std::string> payloads;
  for (const auto& [name, m] : sections) {
    if (name.size() > 8) raise(ErrorCode::InvalidArgument, "section name longer than 8 bytes: " + name);
    payloads.push_back(encode_matrix(m));
  }
  std::uint64_t offset = 16 + 24 * sections.size();
  std::size_t i = 0;
  for (const auto& entry : sections) {
    std::string name = entry.first;
    name.resize(8, '\0');
    out += name;
    put_u64(out, offset);
    put_u64(out, payloads[i].size());
    offset += payloads[i].size();
    ++i;
  }
  for (const auto& p : payloads) out += p;
  write_file_atomic(path, out);
}

SectionMap read_container(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kStateMagic, 8) != 0) {
    raise(ErrorCode::Io, path + ": not a state container");
  }
  const std::uint64_t count = get_u64(bytes, 8);
  if (count > (bytes.size() - 16) / 24) raise(ErrorCode::Io, path + ": section table truncated");
  SectionMap out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = 16 + 24 * i;
    std::string name = bytes.substr(at, 8);
    name.erase(name.find_last_not_of('\0') + 1);
    const std::uint64_t offset = get_u64(bytes, at + 8);
    const std::uint64_t length = get_u64(bytes, at + 16);
    if (offset > bytes.size() || length > bytes.size() - offset) {
      raise(ErrorCode::Io, path + ": section " + name + " out of bounds");
    }
    out[name] = decode_matrix(bytes.substr(offset, length));
  }
  return out;
}

}  // namespace l1h
