#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mmapsys/model_file.hpp"

using namespace mmapsys;

namespace {

const std::string kModel = std::string(MMAPSYS_MODEL_DIR) + "/reference.model";

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_model(in, "test.model");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "test.model");
    return e.line();
  }
  ADD_FAILURE() << "no parse error";
  return -1;
}

std::string replace_line(const std::string& text, int lineno, const std::string& with) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) out << (n == lineno ? with : line) << '\n';
  return out.str();
}

int line_of(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n)
    if (line.rfind(prefix, 0) == 0) return n;
  return -1;
}

}  // namespace

TEST(ModelFile, BundledModelIsReference) {
  const ModelConfig a = load_model(kModel);
  const ModelConfig b = reference_config();
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.R, b.R);
  EXPECT_EQ(a.pm, b.pm);
  EXPECT_EQ(a.family, b.family);
  EXPECT_EQ(a.unit.internal.subgen(), b.unit.internal.subgen());
  EXPECT_EQ(a.unit.shock.subgen(), b.unit.shock.subgen());
  EXPECT_EQ(a.unit.W, b.unit.W);
  EXPECT_EQ(a.unit.omega0, b.unit.omega0);
  EXPECT_EQ(a.unit.inspection.subgen(), b.unit.inspection.subgen());
  EXPECT_EQ(a.repair1.subgen(), b.repair1.subgen());
  EXPECT_EQ(a.repair2.subgen(), b.repair2.subgen());
  EXPECT_EQ(a.vacation.subgen(), b.vacation.subgen());
  EXPECT_EQ(a.costs.c0, b.costs.c0);
  EXPECT_EQ(a.costs.fnu, b.costs.fnu);
  EXPECT_EQ(a.unit.n1, b.unit.n1);
}

TEST(ModelFile, MissingFile) { EXPECT_THROW(load_model("/nonexistent/x.model"), ParseError); }

TEST(ModelFile, ShortMatrixRow) {
  const std::string text = read_all(kModel);
  const int t = line_of(text, "matrix T ");
  EXPECT_EQ(parse_error_line(replace_line(text, t + 1, "-0.04 0.02 0")), t + 1);
}

TEST(ModelFile, BadNumber) {
  const std::string text = read_all(kModel);
  const int a = line_of(text, "vector alpha");
  EXPECT_EQ(parse_error_line(replace_line(text, a + 1, "1 0 zero 0")), a + 1);
}

TEST(ModelFile, UnknownDirective) { EXPECT_EQ(parse_error_line("scalar n 4\ntensor X 2\n"), 2); }

TEST(ModelFile, InvalidPhPointsAtItsMatrix) {
  const std::string text = read_all(kModel);
  const int l = line_of(text, "matrix L ");
  EXPECT_EQ(parse_error_line(replace_line(text, l + 1, "-0.1  0.2")), l);
}

TEST(ModelFile, InconsistentExitPointsAtVector) {
  const std::string text = read_all(kModel);
  const int tr = line_of(text, "vector Tr0");
  EXPECT_EQ(parse_error_line(replace_line(text, tr + 1, "0.016 0.008 0.048 0.5")), tr);
}

TEST(ModelFile, BadFlag) {
  const std::string text = read_all(kModel);
  EXPECT_EQ(parse_error_line(replace_line(text, line_of(text, "flag pm"), "flag pm maybe")), line_of(text, "flag pm"));
}
