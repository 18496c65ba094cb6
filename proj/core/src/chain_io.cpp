#include "evoset/chain_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "evoset/error.hpp"

namespace evoset {
namespace {

bool is_skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ChainKernel read_chain(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    std::istringstream ls(line);
    std::string keyword;
    long long count = -1;
    if (!(ls >> keyword >> count) || keyword != "states" || count <= 0) {
      parse_error(line_no, "expected 'states <n>' header");
    }
    n = static_cast<std::size_t>(count);
    have_header = true;
    break;
  }
  if (!have_header) throw Error(ErrorKind::Parse, "empty chain file");

  SparseRows rows(n);
  std::optional<std::vector<double>> pi;
  bool in_pi = false;
  std::vector<char> pi_seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    std::istringstream ls(line);
    if (!in_pi) {
      std::string first;
      ls >> first;
      if (first == "pi") {
        in_pi = true;
        pi.emplace(n, 0.0);
        pi_seen.assign(n, 0);
        continue;
      }
      std::istringstream full(line);
      long long x = -1, y = -1;
      double p = 0.0;
      std::string extra;
      if (!(full >> x >> y >> p) || (full >> extra)) parse_error(line_no, "expected '<x> <y> <p>'");
      if (x < 0 || y < 0 || static_cast<std::size_t>(x) >= n || static_cast<std::size_t>(y) >= n) {
        parse_error(line_no, "state id out of range");
      }
      rows[static_cast<std::size_t>(x)].push_back({static_cast<StateId>(y), p});
    } else {
      long long x = -1;
      double w = 0.0;
      std::string extra;
      if (!(ls >> x >> w) || (ls >> extra)) parse_error(line_no, "expected '<x> <weight>'");
      if (x < 0 || static_cast<std::size_t>(x) >= n) parse_error(line_no, "state id out of range");
      if (pi_seen[static_cast<std::size_t>(x)]) parse_error(line_no, "duplicate pi entry");
      pi_seen[static_cast<std::size_t>(x)] = 1;
      (*pi)[static_cast<std::size_t>(x)] = w;
    }
  }
  if (in_pi) {
    for (std::size_t x = 0; x < n; ++x) {
      if (!pi_seen[x]) throw Error(ErrorKind::Parse, "pi block misses state " + std::to_string(x));
    }
  }
  return build_chain(std::move(rows), std::move(pi));
}

ChainKernel read_chain_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  return read_chain(in);
}

void write_chain(std::ostream& out, const ChainKernel& chain) {
  out << "states " << chain.size() << '\n';
  for (StateId x = 0; x < chain.size(); ++x) {
    for (const Transition& t : chain.row(x)) {
      out << x << ' ' << t.target << ' ' << format_double(t.prob) << '\n';
    }
  }
  out << "pi\n";
  for (StateId x = 0; x < chain.size(); ++x) out << x << ' ' << format_double(chain.pi(x)) << '\n';
}

void write_chain_file(const std::filesystem::path& path, const ChainKernel& chain) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  write_chain(out, chain);
}

std::vector<StateSet> read_family(std::istream& in, const ChainKernel& chain) {
  std::vector<StateSet> family;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    std::vector<StateId> ids;
    std::istringstream ls(line);
    std::string token;
    while (std::getline(ls, token, ',')) {
      const auto first = token.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      try {
        std::size_t used = 0;
        const long long id = std::stoll(token, &used);
        if (id < 0 || static_cast<std::size_t>(id) >= chain.size()) {
          parse_error(line_no, "state id out of range");
        }
        ids.push_back(static_cast<StateId>(id));
      } catch (const std::logic_error&) {
        parse_error(line_no, "bad state id '" + token + "'");
      }
    }
    family.push_back(chain.subset(ids));
  }
  return family;
}

std::vector<StateSet> read_family_file(const std::filesystem::path& path,
                                       const ChainKernel& chain) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  return read_family(in, chain);
}

void write_family(std::ostream& out, const std::vector<StateSet>& family) {
  for (const StateSet& set : family) {
    bool first = true;
    set.for_each([&](StateId x) {
      if (!first) out << ',';
      out << x;
      first = false;
    });
    out << '\n';
  }
}

}  // namespace evoset
