#include <gtest/gtest.h>

#include <sstream>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/generators.hpp"

using namespace evoset;

TEST(ChainIo, RoundTripPreservesKernel) {
  const ChainKernel chain = random_chain(12, 9).chain;
  std::stringstream buf;
  write_chain(buf, chain);
  const ChainKernel back = read_chain(buf);
  ASSERT_EQ(back.size(), chain.size());
  for (StateId x = 0; x < chain.size(); ++x) {
    EXPECT_NEAR(back.pi(x), chain.pi(x), 1e-15);
    for (StateId y = 0; y < chain.size(); ++y) EXPECT_NEAR(back.prob(x, y), chain.prob(x, y), 1e-15);
  }
}

TEST(ChainIo, CommentsAndBlankLinesSkipped) {
  std::istringstream in("# two-cycle\n\nstates 2\n0 1 1\n  # note\n1 0 1.0\n");
  const ChainKernel chain = read_chain(in);
  EXPECT_DOUBLE_EQ(chain.pi(1), 0.5);
}

TEST(ChainIo, ParseErrors) {
  const char* bad[] = {"", "nodes 2\n", "states 2\n0 1\n", "states 2\n0 5 1\n",
                       "states 2\n0 1 1\n1 0 1\npi\n0 1\n", "states 2\n0 1 1\n1 0 1 extra\n"};
  for (const char* text : bad) {
    std::istringstream in(text);
    try {
      read_chain(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse) << text;
    }
  }
}

TEST(ChainIo, NonStochasticRowsRejected) {
  std::istringstream in("states 2\n0 1 0.5\n1 0 1\n");
  try {
    read_chain(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotStochastic);
  }
}

TEST(ChainIo, FamilyRoundTrip) {
  const ChainKernel chain = cycle(6, 0.5).chain;
  std::vector<StateSet> family{chain.subset({0, 1}), chain.subset({2, 4, 5})};
  std::stringstream buf;
  write_family(buf, family);
  EXPECT_EQ(buf.str(), "0,1\n2,4,5\n");
  EXPECT_EQ(read_family(buf, chain), family);
}

TEST(ChainIo, FamilyIdOutOfRange) {
  const ChainKernel chain = cycle(3, 0.5).chain;
  std::istringstream in("0,7\n");
  EXPECT_THROW(read_family(in, chain), Error);
}

TEST(ChainIo, FormatDoubleRoundTrips) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
}
