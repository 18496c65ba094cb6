#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

// Chain files are whitespace separated text:
//
//   states <n>
//   <x> <y> <p>          one line per nonzero transition, 0-based ids
//   pi                   optional block
//   <x> <weight>         n lines
//
// Blank lines and lines starting with '#' are ignored. Numbers are written with 17
// significant digits so a write/read cycle reproduces every double exactly.

ChainKernel read_chain(std::istream& in);
ChainKernel read_chain_file(const std::filesystem::path& path);
void write_chain(std::ostream& out, const ChainKernel& chain);
void write_chain_file(const std::filesystem::path& path, const ChainKernel& chain);

/// Set family files: one set per line, comma-joined state ids.
std::vector<StateSet> read_family(std::istream& in, const ChainKernel& chain);
std::vector<StateSet> read_family_file(const std::filesystem::path& path, const ChainKernel& chain);
void write_family(std::ostream& out, const std::vector<StateSet>& family);

/// printf("%.17g") for a double.
std::string format_double(double value);

}  // namespace evoset
