#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

inline std::string read_data(const std::string& name) {
  std::ifstream in(std::string(HLWEAVE_TEST_DATA) + "/" + name);
  REQUIRE_MESSAGE(in.good(), name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
