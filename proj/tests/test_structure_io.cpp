#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "dnp/structure_io.hpp"

using namespace dnpgcn;

namespace {

// Fixed-column ATOM record. Name is padded into columns 13-16 the way PDB
// writers do for one-letter elements.
std::string atom(int serial, std::string name, std::string res, char chain, int seq, double x, double y,
                 double z, double occ = 1.0, char altloc = ' ', char icode = ' ') {
  char buf[96];
  std::snprintf(buf, sizeof buf, "ATOM  %5d %-4s%c%3s %c%4d%c   %8.3f%8.3f%8.3f%6.2f%6.2f           %c", serial,
                (name.size() < 4 ? " " + name : name).c_str(), altloc, res.c_str(), chain, seq, icode, x, y, z,
                occ, 0.0, name[0]);
  return buf;
}

}  // namespace

TEST_CASE("parse_pdb echoes a two-residue fragment") {
  const std::string text = atom(1, "N", "ALA", 'A', 1, 0.0, 0.0, 0.0) + "\n" +
                           atom(2, "CA", "ALA", 'A', 1, 1.458, 0.0, 0.0) + "\n" +
                           atom(3, "C", "ALA", 'A', 1, 2.009, 1.420, 0.0) + "\n" +
                           atom(4, "CA", "GLY", 'A', 2, 3.800, -1.250, 2.125) + "\n" +
                           atom(5, "C", "GLY", 'A', 2, 4.5, -0.5, 3.0) + "\n";
  const auto s = parse_pdb(text);
  REQUIRE(s.residues.size() == 2);
  CHECK(s.skipped_residues == 0);
  CHECK(s.residues[0].name == "ALA");
  CHECK(s.residues[0].c_alpha == Vec3{1.458, 0.0, 0.0});
  REQUIRE(s.residues[0].carboxyl_c);
  CHECK(*s.residues[0].carboxyl_c == Vec3{2.009, 1.420, 0.0});
  CHECK(s.residues[1].name == "GLY");
  CHECK(s.residues[1].c_alpha == Vec3{3.8, -1.25, 2.125});
  CHECK(s.residues[1].chain == 'A');
  CHECK(s.residues[1].sequence_number == 2);
}

TEST_CASE("parse_pdb handles missing atoms, foreign records and alternates") {
  SUBCASE("missing carboxyl C") {
    const auto s = parse_pdb(atom(1, "CA", "SER", 'A', 7, 1, 2, 3) + "\n");
    REQUIRE(s.residues.size() == 1);
    CHECK_FALSE(s.residues[0].carboxyl_c);
  }
  SUBCASE("non-ATOM lines are ignored") {
    const std::string text = "HEADER    TEST\n" + atom(1, "CA", "ALA", 'A', 1, 1, 0, 0) + "\n" +
                             "this is not a record at all\n" + "HETATM    9  O   HOH A 100       9.000   9.000   9.000  1.00  0.00           O\n" +
                             atom(2, "CA", "ALA", 'A', 2, 2, 0, 0) + "\nEND\n";
    const auto s = parse_pdb(text);
    REQUIRE(s.residues.size() == 2);
    CHECK(s.residues[1].c_alpha == Vec3{2, 0, 0});
  }
  SUBCASE("residue without CA is skipped and counted") {
    const std::string text = atom(1, "N", "ALA", 'A', 1, 0, 0, 0) + "\n" + atom(2, "CA", "ALA", 'A', 2, 1, 0, 0) + "\n";
    const auto s = parse_pdb(text);
    CHECK(s.residues.size() == 1);
    CHECK(s.skipped_residues == 1);
  }
  SUBCASE("highest occupancy alternate wins, ties keep the first") {
    const std::string text = atom(1, "CA", "ALA", 'A', 1, 1, 0, 0, 0.40, 'A') + "\n" +
                             atom(2, "CA", "ALA", 'A', 1, 2, 0, 0, 0.60, 'B') + "\n" +
                             atom(3, "C", "ALA", 'A', 1, 5, 0, 0, 0.50, 'A') + "\n" +
                             atom(4, "C", "ALA", 'A', 1, 6, 0, 0, 0.50, 'B') + "\n";
    const auto s = parse_pdb(text);
    REQUIRE(s.residues.size() == 1);
    CHECK(s.residues[0].c_alpha == Vec3{2, 0, 0});
    CHECK(*s.residues[0].carboxyl_c == Vec3{5, 0, 0});
  }
  SUBCASE("insertion codes and chains split residues") {
    const std::string text = atom(1, "CA", "ALA", 'A', 5, 1, 0, 0) + "\n" +
                             atom(2, "CA", "ALA", 'A', 5, 2, 0, 0, 1.0, ' ', 'A') + "\n" +
                             atom(3, "CA", "ALA", 'B', 5, 3, 0, 0) + "\n";
    CHECK(parse_pdb(text).residues.size() == 3);
  }
  SUBCASE("only the first model is read") {
    const std::string text = "MODEL        1\n" + atom(1, "CA", "ALA", 'A', 1, 1, 0, 0) + "\nENDMDL\nMODEL        2\n" +
                             atom(1, "CA", "ALA", 'A', 1, 9, 0, 0) + "\n" + atom(2, "CA", "ALA", 'A', 2, 9, 9, 0) + "\n";
    const auto s = parse_pdb(text);
    REQUIRE(s.residues.size() == 1);
    CHECK(s.residues[0].c_alpha == Vec3{1, 0, 0});
  }
}

TEST_CASE("parse_pdb reports malformed ATOM lines with their line number") {
  std::string bad = atom(2, "CA", "ALA", 'A', 2, 1, 0, 0);
  bad.replace(30, 8, "  1.x0  ");
  const std::string text = atom(1, "CA", "ALA", 'A', 1, 1, 0, 0) + "\n" + bad + "\n";
  try {
    parse_pdb(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_pdb("ATOM      1  CA  ALA A   1       1.000\n"), ParseError);
  std::string bad_seq = atom(1, "CA", "ALA", 'A', 1, 1, 0, 0);
  bad_seq.replace(22, 4, "  x1");
  CHECK_THROWS_AS(parse_pdb(bad_seq), ParseError);
}

TEST_CASE("parse_molecule strips hydrogens and reindexes bonds") {
  SUBCASE("methane") {
    const auto m = parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0,0]},
      {"element":"H","xyz":[0.63,0.63,0.63]},{"element":"H","xyz":[-0.63,-0.63,0.63]},
      {"element":"H","xyz":[-0.63,0.63,-0.63]},{"element":"H","xyz":[0.63,-0.63,-0.63]}],
      "bonds":[[0,1],[0,2],[0,3],[0,4]]})");
    CHECK(m.atoms.size() == 1);
    CHECK(m.bonds.empty());
  }
  SUBCASE("ethane heavy atoms") {
    const auto m = parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0,0]},{"element":"C","xyz":[1.54,0,0]}],
      "bonds":[[0,1]]})");
    REQUIRE(m.atoms.size() == 2);
    REQUIRE(m.bonds.size() == 1);
    CHECK(m.bonds[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(m.atoms[1].position == Vec3{1.54, 0, 0});
  }
  SUBCASE("reindexing after interleaved hydrogens, duplicate and reversed bonds") {
    const auto m = parse_molecule(R"({"atoms":[{"element":"H","xyz":[0,0,1]},{"element":"c","xyz":[0,0,0]},
      {"element":"H","xyz":[0,1,1]},{"element":"CL","xyz":[1.8,0,0]}],
      "bonds":[[3,1],[1,3],[0,1]]})");
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.atoms[0].element == "C");
    CHECK(m.atoms[1].element == "Cl");
    REQUIRE(m.bonds.size() == 1);
    CHECK(m.bonds[0] == std::pair<std::size_t, std::size_t>{0, 1});
  }
}

TEST_CASE("parse_molecule rejects malformed input") {
  CHECK_THROWS_AS(parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0,0]},{"element":"C","xyz":[1,0,0]}],
    "bonds":[[0,99]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0,0]}],"bonds":[[0,0]]})"), ParseError);
  CHECK_THROWS_AS(parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0]}]})"), ParseError);
  CHECK_THROWS_AS(parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,"a",0]}]})"), ParseError);
  CHECK_THROWS_AS(parse_molecule(R"({"bonds":[]})"), ParseError);
  CHECK_THROWS_AS(parse_molecule("{not json"), ParseError);
  CHECK_THROWS_AS(parse_molecule(R"({"atoms":[{"element":"C","xyz":[0,0,0]}],"bonds":[[0,-1]]})"), ParseError);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "dnp_structure_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.txt";
  write_text_file_atomic(path, "hello\nworld\n");
  CHECK(read_text_file(path) == "hello\nworld\n");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  try {
    read_text_file(dir / "missing.txt");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.txt") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
