// Writes the bundled synthetic draft fixture.
#include <fstream>
#include <iostream>

#include "draftlmt/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture OUTPUT.csv\n";
    return 2;
  }
  const auto rows = draftlmt::synthetic_draft_rows({2001, 2002, 2003, 2004}, 300, 20240611);
  std::ofstream(argv[1], std::ios::binary) << draftlmt::to_csv(rows);
  return 0;
}
