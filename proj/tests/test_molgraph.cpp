#include <gtest/gtest.h>

#include <random>

#include "sage/formula.hpp"
#include "sage/rings.hpp"
#include "sage/smiles.hpp"

using namespace sage;

namespace {

ParseErrorKind error_kind(std::string_view smiles) {
  try {
    parse_smiles(smiles);
  } catch (const ParseError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << smiles;
  return ParseErrorKind::kSyntax;
}

std::vector<int> implicit_h(const Molecule &m) {
  std::vector<int> h;
  for (int i = 0; i < static_cast<int>(m.atom_count()); ++i)
    h.push_back(m.implicit_hydrogens(i));
  return h;
}

}  // namespace

TEST(Parse, Ethanolamine) {
  const Molecule m = parse_smiles("NCCO");
  EXPECT_EQ(m.heavy_atom_count(), 4);
  EXPECT_EQ(implicit_h(m), (std::vector<int>{2, 2, 2, 1}));
}

TEST(Parse, Piperazine) {
  const Molecule m = parse_smiles("C1CNCCN1");
  EXPECT_EQ(m.atom_count(), 6u);
  int n = 0;
  for (const Atom &a : m.atoms()) {
    EXPECT_TRUE(a.in_ring);
    n += a.element == Element::N;
  }
  EXPECT_EQ(n, 2);
  const auto rings = perceive_rings(m);
  ASSERT_EQ(rings.size(), 1u);
  EXPECT_EQ(rings[0].size(), 6u);
}

TEST(Parse, Errors) {
  EXPECT_EQ(error_kind("C("), ParseErrorKind::kSyntax);
  EXPECT_EQ(error_kind("CC)"), ParseErrorKind::kSyntax);
  EXPECT_EQ(error_kind(""), ParseErrorKind::kSyntax);
  EXPECT_EQ(error_kind("C1CC"), ParseErrorKind::kRingClosure);
  EXPECT_EQ(error_kind("C(=O)(=O)=O"), ParseErrorKind::kValence);
  EXPECT_EQ(error_kind("CC.N"), ParseErrorKind::kDisconnected);
  EXPECT_EQ(error_kind("[Na+]"), ParseErrorKind::kUnsupportedElement);
  EXPECT_EQ(error_kind("CX"), ParseErrorKind::kSyntax);
  EXPECT_EQ(error_kind("c1cccc1"), ParseErrorKind::kValence);
  EXPECT_EQ(error_kind("[CH3]"), ParseErrorKind::kValence);
}

TEST(Parse, StereoDiscarded) {
  EXPECT_EQ(canonicalize("C[C@H](N)CO"), canonicalize("CC(N)CO"));
  EXPECT_EQ(canonicalize("F/C=C/F"), canonicalize("FC=CF"));
}

TEST(Parse, Aromatic) {
  const Molecule benzene = parse_smiles("c1ccccc1");
  EXPECT_EQ(to_string(molecular_formula(benzene)), "C6H6");
  EXPECT_EQ(canonicalize("c1ccccc1"), canonicalize("C1=CC=CC=C1"));
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("c1cc[nH]c1"))), "C4H5N");
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("c1ccncc1"))), "C5H5N");
  EXPECT_EQ(canonicalize("c1ccc2ccccc2c1"), canonicalize("C1=CC=C2C=CC=CC2=C1"));
  const auto arom = aromatic_atoms(parse_smiles("Nc1ccccc1"));
  EXPECT_FALSE(arom[0]);
  EXPECT_TRUE(arom[1]);
  const auto pyrrole = aromatic_atoms(parse_smiles("c1cc[nH]c1"));
  for (bool a : pyrrole) EXPECT_TRUE(a);
  for (bool a : aromatic_atoms(parse_smiles("C1CCNCC1"))) EXPECT_FALSE(a);
  for (bool a : aromatic_atoms(parse_smiles("C1=CCC=CC1"))) EXPECT_FALSE(a);
}

TEST(Parse, Charged) {
  const Molecule m = parse_smiles("[NH4+]");
  EXPECT_EQ(to_string(molecular_formula(m)), "H4N");
  EXPECT_EQ(canonicalize("C[N+](C)(C)C"), "C[N+](C)(C)C");
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("CC(=O)[O-]"))), "C2H3O2");
}

TEST(Radical, BracketHydrogens) {
  EXPECT_FALSE(is_radical_free(read_smiles_graph("[CH3]")));
  EXPECT_TRUE(is_radical_free(read_smiles_graph("C")));
  EXPECT_TRUE(is_radical_free(read_smiles_graph("[NH4+]")));
  EXPECT_FALSE(is_radical_free(read_smiles_graph("C[O]")));
  EXPECT_TRUE(is_radical_free(read_smiles_graph("C[OH]")));
}

TEST(Canonical, Examples) {
  EXPECT_EQ(canonicalize("OCCN"), canonicalize("NCCO"));
  EXPECT_EQ(canonicalize("C1CNCCN1"), canonicalize("N1CCNCC1"));
  EXPECT_EQ(canonicalize("C"), "C");
  EXPECT_EQ(canonicalize("[CH4]"), "C");
  EXPECT_EQ(canonicalize("C%10CC%10"), canonicalize("C1CC1"));
}

TEST(Canonical, RandomPermutationInvariance) {
  const char *inputs[] = {
      "NCCO",          "NC(CO)(CO)CO", "OCCNCCO",        "CCN(CC)CCO",
      "CC1CNCCN1",     "OCCC1CCCCN1",  "C1CNCCNC1",      "NCCNCCNCCN",
      "C1CC2CCC1C2",   "CN1CCCCC1CO",  "c1ccc2ccccc2c1", "C12C3C4C1C5C2C3C45",
      "CC(C)(C)N",     "C1CC11CC1",    "O=C1CCCN1",      "C#CCN",
  };
  std::mt19937_64 rng(7);
  for (const char *s : inputs) {
    const Molecule m = parse_smiles(s);
    const std::string ref = canonical_smiles(m);
    for (int i = 0; i < 25; ++i) {
      const std::string r = random_smiles(m, rng);
      EXPECT_EQ(canonicalize(r), ref) << s << " via " << r;
    }
    EXPECT_EQ(canonicalize(ref), ref);
  }
}

TEST(Formula, Examples) {
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("CC(C)(N)CO"))), "C4H11NO");
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("OCCNCCO"))), "C4H11NO2");
  EXPECT_EQ(to_string(molecular_formula(parse_smiles("C"))), "CH4");
  EXPECT_EQ(parse_formula("C4H11NO2"), molecular_formula(parse_smiles("OCCNCCO")));
  EXPECT_THROW(parse_formula("C4h"), std::invalid_argument);
  EXPECT_NEAR(molecular_weight(parse_smiles("NCCO")), 61.084, 0.01);
}

TEST(Rings, Counts) {
  EXPECT_TRUE(perceive_rings(parse_smiles("NCCO")).empty());
  const auto nb = perceive_rings(parse_smiles("C1CC2CCC1C2"));
  ASSERT_EQ(nb.size(), 2u);
  EXPECT_EQ(nb[0].size(), 5u);
  EXPECT_EQ(nb[1].size(), 5u);
  const auto cubane = perceive_rings(parse_smiles("C12C3C4C1C5C2C3C45"));
  ASSERT_EQ(cubane.size(), 5u);
  for (const auto &r : cubane) EXPECT_EQ(r.size(), 4u);
  const auto spiro = perceive_rings(parse_smiles("C1CC11CC1"));
  ASSERT_EQ(spiro.size(), 2u);
}

TEST(Rings, Distances) {
  const auto d = topological_distances(parse_smiles("NCCO"));
  EXPECT_EQ(d[0][3], 3);
  EXPECT_EQ(d[3][0], 3);
  EXPECT_EQ(d[1][1], 0);
}
