#pragma once

#include "l1h/linalg.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace l1h {

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

Matrix read_matrix_binary(const std::string& path);
void write_matrix_binary(const std::string& path, const Matrix& m);

// Reads either format; binary is detected by its magic.
Matrix read_matrix(const std::string& path);

std::string encode_matrix(const Matrix& m);
Matrix decode_matrix(const std::string& bytes);

// Named sections, each an encoded matrix, behind a small offset table.
using SectionMap = std::map<std::string, Matrix>;
void write_container(const std::string& path, const SectionMap& sections);
SectionMap read_container(const std::string& path);

// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace l1h
