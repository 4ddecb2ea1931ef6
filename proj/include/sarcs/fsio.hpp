#ifndef SARCS_FSIO_HPP
#define SARCS_FSIO_HPP

#include <string>

#include "sarcs/errors.hpp"

namespace sarcs {

/// Reads a whole file into memory.  Throws with the given kind on failure
/// so callers can classify config files (Usage) vs data files (Data).
std::string read_file(const std::string& path, ErrorKind kind);

/// Writes via a temporary file in the same directory plus rename, so
/// readers never observe a partially written artifact.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace sarcs

#endif
