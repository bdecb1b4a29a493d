#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "kronred/errors.hpp"
#include "kronred/parser.hpp"

using namespace kronred;

namespace {

const char* kRichModel =
    "# two-step pathway with a saturating second step\n"
    "species X1, X2, X3, X4\n"
    "\n"
    "reaction r1: X1 + 2 X2 <-> X3 ; massaction kf=1 kr=0.5\n"
    "reaction r2: X3 -> X4 ; mm kf=2 Km(X3)=0.5 Km(X4)=1\n"
    "boundary X4: constant 0.05\n"
    "boundary X3: linear X4 -0.1\n";

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("parses the reference model") {
  Network net = parse_network(kRichModel);
  REQUIRE(net.species_count() == 4);
  CHECK(net.species[0].name == "X1");
  CHECK(net.species[3].name == "X4");
  REQUIRE(net.complex_count() == 3);
  CHECK(net.complex_name(0) == "X1+2 X2");
  CHECK(net.complex_name(1) == "X3");
  CHECK(net.complex_name(2) == "X4");

  REQUIRE(net.reactions.size() == 2);
  const Reaction& r1 = net.reactions[0];
  CHECK(r1.id == "r1");
  CHECK(r1.substrate == 0);
  CHECK(r1.product == 1);
  CHECK(r1.reversible);
  CHECK(r1.law.kind == LawKind::MassAction);
  CHECK(r1.law.k_forward == 1.0);
  CHECK(r1.law.k_reverse == 0.5);

  const Reaction& r2 = net.reactions[1];
  CHECK_FALSE(r2.reversible);
  CHECK(r2.law.kind == LawKind::MichaelisMenten);
  CHECK(r2.law.k_forward == 2.0);
  CHECK(r2.law.km.at(2) == 0.5);
  CHECK(r2.law.km.at(3) == 1.0);

  REQUIRE(net.boundary.size() == 2);
  CHECK(net.boundary[0].complex == 2);
  CHECK(net.boundary[0].form == BoundaryFlux::Form::Constant);
  CHECK(net.boundary[0].value == 0.05);
  CHECK(net.boundary[1].complex == 1);
  CHECK(net.boundary[1].form == BoundaryFlux::Form::Linear);
  CHECK(net.boundary[1].species == 3);
  CHECK(net.boundary[1].gain == -0.1);
}

TEST_CASE("species appear in first-use order without declarations") {
  Network net = parse_network("reaction r1: B + A -> C ; massaction kf=1\n");
  CHECK(net.species[0].name == "B");
  CHECK(net.species[1].name == "A");
  CHECK(net.species[2].name == "C");
}

TEST_CASE("repeated species in a complex accumulate") {
  Network net = parse_network("reaction r1: X1 + X1 -> X2 ; massaction kf=1\n");
  CHECK(net.complex_name(net.reactions[0].substrate) == "2 X1");
}

TEST_CASE("parse errors carry 1-based positions") {
  SUBCASE("unknown statement") {
    try {
      parse_network("model foo\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == 1);
    }
  }
  SUBCASE("self-loop reported at the reaction id") {
    try {
      parse_network("species A\nreaction r1: A -> A ; massaction kf=1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 10);
      CHECK(std::string(e.what()).find("substrate equals product") != std::string::npos);
    }
  }
  SUBCASE("unexpected character") {
    try {
      parse_network("reaction r1: A -> B @ massaction kf=1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == 21);
    }
  }
}

TEST_CASE("statement rejections") {
  CHECK_THROWS_AS(parse_network("species A, A\n"), ParseError);
  CHECK_THROWS_AS(parse_network("species A\nspecies A\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=1 junk\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B massaction kf=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A => B ; massaction kf=1\n"), ParseError);
}

TEST_CASE("strict mode requires declarations") {
  ParseOptions strict;
  strict.strict = true;
  const char* text = "species A\nreaction r1: A -> B ; massaction kf=1\n";
  CHECK_NOTHROW(parse_network(text));
  CHECK_THROWS_AS(parse_network(text, strict), ParseError);
  CHECK_NOTHROW(parse_network("species A, B\nreaction r1: A -> B ; massaction kf=1\n", strict));
}

TEST_CASE("rate law parameter validation") {
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A <-> B ; massaction kf=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=1 kr=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=0\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=-1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=1 kf=2\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; hill kf=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; massaction kf=1 Km(A)=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; mm kf=1 Km(A)=1 Km(A)=2\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: A -> B ; mm kf=1 Km(A)=0\n"), ParseError);
  // Km for a non-participant is caught when the reaction is assembled.
  CHECK_THROWS_AS(parse_network("species C\nreaction r1: A -> B ; mm kf=1 Km(A)=1 Km(B)=1 Km(C)=1\n"),
                  ParseError);
  // mm law with every participant covered parses, irreversible is fine.
  Network net = parse_network("reaction r1: A -> B ; mm kf=1 Km(A)=2 Km(B)=3\n");
  CHECK(net.reactions[0].law.kind == LawKind::MichaelisMenten);
}

TEST_CASE("stoichiometric coefficient bounds") {
  CHECK_THROWS_AS(parse_network("reaction r1: 0 A -> B ; massaction kf=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: 1.5 A -> B ; massaction kf=1\n"), ParseError);
  CHECK_THROWS_AS(parse_network("reaction r1: 65 A -> B ; massaction kf=1\n"), ParseError);
  CHECK_NOTHROW(parse_network("reaction r1: 64 A -> B ; massaction kf=1\n"));
  CHECK_THROWS_AS(parse_network("reaction r1: 33 A + 33 A -> B ; massaction kf=1\n"), ParseError);
}

TEST_CASE("boundary statement validation") {
  const char* base = "reaction r1: A -> B ; massaction kf=1\n";
  CHECK_THROWS_AS(parse_network(std::string(base) + "boundary C: constant 1\n"), ParseError);
  CHECK_THROWS_AS(parse_network(std::string(base) + "boundary A: ramp 1\n"), ParseError);
  CHECK_THROWS_AS(parse_network(std::string(base) + "boundary A: linear A\n"), ParseError);
  Network net = parse_network(std::string(base) + "boundary A: linear B -0.25\n");
  CHECK(net.boundary[0].gain == -0.25);
  CHECK(net.boundary[0].species == 1);
}

TEST_CASE("serialization round-trips exactly") {
  Network net = parse_network(kRichModel);
  std::string text = serialize_dsl(net);
  Network again = parse_network(text);
  CHECK(again == net);
  CHECK(serialize_dsl(again) == text);
}

TEST_CASE("canonical complex names re-parse") {
  Network net = parse_network(
      "reaction r1: X1 + 2 X2 <-> X3 ; massaction kf=0.1 kr=3.25\n"
      "boundary X1+2 X2: constant 0.01\n");
  CHECK(net.boundary[0].complex == 0);
  CHECK(net.complex_by_name("X1+2 X2") == 0);
  CHECK(net.complex_by_name("2 X2 + X1") == 0);
}

TEST_CASE("format_double round-trips doubles at minimal width") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.1");
  for (double v : {1.0 / 3.0, 2.2250738585072014e-308, 0.05, 123456.789, 6.02e23}) {
    CAPTURE(v);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("load_network_file dispatches on extension") {
  auto dsl = temp_file("kronred_parser_test.dsl", kRichModel);
  Network net = load_network_file(dsl.string());
  CHECK(net.species_count() == 4);
  CHECK_THROWS_AS(load_network_file("/nonexistent/path/model.dsl"), IoError);
  auto bad_json = temp_file("kronred_parser_test.json", "{ not json");
  CHECK_THROWS_AS(load_network_file(bad_json.string()), ModelError);
}
