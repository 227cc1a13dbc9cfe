#include <sstream>

#include "doctest.h"
#include "skewbs/errors.hpp"
#include "skewbs/io.hpp"
#include "support.hpp"

using namespace skewbs;

namespace {

RunConfig mccool_config() {
  RunConfig c;
  c.input_path = SKEWBS_DATA_DIR "/mccool.csv";
  c.response_column = "time";
  c.covariate_columns = {"stress"};
  c.log_response = true;
  c.log_covariates = {"stress"};
  return c;
}

}  // namespace

TEST_CASE("McCool ingestion") {
  const Dataset d = ingest(mccool_config());
  CHECK(d.n() == 40);
  CHECK(d.p() == 2);
  CHECK((d.X().col(0).array() == 1.0).all());
  const Dataset ref = testing::mccool();
  CHECK(d.y() == ref.y());
  CHECK(d.X() == ref.X());

  RunConfig plain = mccool_config();
  plain.intercept = false;
  CHECK(ingest(plain).p() == 1);
}

TEST_CASE("ingestion errors") {
  std::istringstream zero("t,x\n1.5,2\n0,3\n2,4\n");
  RunConfig c;
  c.response_column = "t";
  c.covariate_columns = {"x"};
  c.log_response = true;
  const CsvTable table = parse_csv(zero);
  try {
    ingest(c, table);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  std::istringstream ragged("t,x\n1,2\n3\n");
  try {
    parse_csv(ragged);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream text("t,x\n1,abc\n");
  CHECK_THROWS_AS(parse_csv(text), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_csv(empty), ParseError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), ParseError);

  c.log_response = false;
  c.covariate_columns = {"t"};
  CHECK_THROWS_AS(ingest(c, table), DomainError);
  c.covariate_columns = {"missing"};
  CHECK_THROWS_AS(ingest(c, table), ParseError);
}

TEST_CASE("dataset CSV round trip is exact") {
  std::mt19937_64 rng(77);
  const auto inst = testing::random_instance(rng, {20, 20, 3, 3});
  std::stringstream buf;
  write_dataset_csv(buf, inst.data, true);
  RunConfig c;
  c.response_column = "y";
  c.covariate_columns = {"x1", "x2"};
  const Dataset back = ingest(c, parse_csv(buf));
  CHECK(back.y() == inst.data.y());
  CHECK(back.X() == inst.data.X());

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
