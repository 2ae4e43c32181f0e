//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/chem/descriptors.hpp"

namespace moldkl::chem {

namespace {

// Byte-identical to data/tpsa_contrib_v1.tsv (verified by test).
constexpr const char kTpsaTableText[] = R"TSV(# moldkl TPSA contribution table
# version: 1
# Reduced N/O fragment set for the C/H/N/O/F dialect. Keys are canonical
# atom-environment strings: SYMBOL[ar][+|-] | H<count> | s<#single> d<#double>
# t<#triple> a<#aromatic> [| r3 when the atom sits in a 3-ring].
# Unmatched N atoms fall back to max(0, 30.5 - 8.2 X + 1.5 H); unmatched O
# atoms to max(0, 28.5 - 8.6 X + 1.5 H), X = neighbor count including H.
# key	contribution	description
N|H0|s3d0t0a0	3.24	amine N, three single bonds
N|H0|s1d1t0a0	12.36	imine-type N
N|H0|s0d0t1a0	23.79	nitrile N
N|H0|s3d0t0a0|r3	3.01	aziridine-type N
N|H1|s2d0t0a0	12.03	secondary amine NH
N|H1|s2d0t0a0|r3	21.94	aziridine NH
N|H1|s0d1t0a0	23.85	imine NH
N|H2|s1d0t0a0	26.02	primary amine NH2
N|H3|s0d0t0a0	26.02	ammonia
N+|H0|s4d0t0a0	0.00	quaternary N+
N+|H0|s2d1t0a0	3.01	iminium-type N+
N+|H0|s1d0t1a0	4.36	nitrilium N+
N+|H1|s3d0t0a0	4.44	protonated tertiary amine
N+|H1|s1d1t0a0	13.97	protonated imine
N+|H2|s2d0t0a0	16.61	protonated secondary amine
N+|H2|s0d1t0a0	25.59	iminium NH2+
N+|H3|s1d0t0a0	27.64	protonated primary amine
N+|H4|s0d0t0a0	27.64	ammonium
Nar|H0|s0d0t0a2	12.89	pyridine-type aromatic n
Nar|H0|s0d0t0a3	4.41	fused aromatic n
Nar|H0|s1d0t0a2	4.93	substituted pyrrole-type n
Nar|H0|s0d1t0a2	8.39	aromatic n with exocyclic double bond
Nar|H1|s0d0t0a2	15.79	pyrrole-type nH
Nar+|H0|s0d0t0a3	4.10	fused aromatic n+
Nar+|H0|s1d0t0a2	3.88	substituted aromatic n+
Nar+|H1|s0d0t0a2	14.14	protonated aromatic nH+
O|H0|s2d0t0a0	9.23	ether O
O|H0|s2d0t0a0|r3	12.53	oxirane O
O|H0|s0d1t0a0	17.07	carbonyl O
O|H1|s1d0t0a0	20.23	hydroxyl OH
O|H2|s0d0t0a0	20.23	water
O-|H0|s1d0t0a0	23.06	oxide anion O-
O-|H1|s0d0t0a0	23.06	hydroxide
Oar|H0|s0d0t0a2	13.14	aromatic o
)TSV";

// Byte-identical to data/logp_contrib_v1.tsv (verified by test).
constexpr const char kLogpTableText[] = R"TSV(# moldkl logP contribution table
# version: 1
# Reduced hydrogen-folded atom-contribution set for the C/H/N/O/F dialect.
# Classes: <element>.<hyb> with hyb 3/2/1 from the highest bond order, ar for
# aromatic-flagged atoms; a trailing x marks carbons bonded to N, O or F.
# Neutral keys carry |H<count>; charged atoms use bare class keys.
# Unmatched atoms contribute 0.
# key	contribution	description
C.3|H3	0.528	sp3 CH3, carbon neighbors only
C.3|H2	0.358	sp3 CH2, carbon neighbors only
C.3|H1	0.127	sp3 CH, carbon neighbors only
C.3|H0	-0.005	sp3 quaternary C, carbon neighbors only
C.3x|H3	0.267	sp3 CH3 bonded to a heteroatom
C.3x|H2	0.137	sp3 CH2 bonded to a heteroatom
C.3x|H1	0.022	sp3 CH bonded to a heteroatom
C.3x|H0	-0.085	sp3 C bonded to a heteroatom
C.2|H2	0.420	terminal =CH2
C.2|H1	0.466	sp2 CH
C.2|H0	0.050	substituted sp2 C
C.2x|H2	0.300	=CH2 near a heteroatom
C.2x|H1	0.136	sp2 CH bonded to a heteroatom
C.2x|H0	-0.054	sp2 C bonded to a heteroatom (incl. carbonyl C)
C.1|H1	0.209	terminal alkyne CH
C.1|H0	0.330	internal alkyne C
C.1x|H1	0.100	sp CH bonded to a heteroatom
C.1x|H0	-0.066	sp C bonded to a heteroatom (incl. nitrile C)
C.ar|H1	0.337	aromatic CH
C.ar|H0	0.296	substituted aromatic C
C.arx|H1	0.126	aromatic CH bonded to a heteroatom
C.arx|H0	0.086	aromatic C bonded to a heteroatom
N.3|H3	-0.534	ammonia
N.3|H2	-0.534	primary amine
N.3|H1	-0.329	secondary amine
N.3|H0	-0.171	tertiary amine
N.2|H1	-0.158	imine NH
N.2|H0	-0.098	imine N
N.1|H0	-0.566	nitrile N
N.ar|H1	-0.186	pyrrole-type nH
N.ar|H0	-0.493	pyridine-type n
N.plus	-0.870	any positively charged N
N.minus	-0.600	any negatively charged N
O.3|H2	-0.467	water
O.3|H1	-0.467	hydroxyl O
O.3|H0	-0.084	ether O
O.2|H0	-0.399	carbonyl O
O.ar|H0	0.130	aromatic o
O.plus	-0.500	any positively charged O
O.minus	-1.189	any negatively charged O
F|H0	0.375	fluorine
H|H0	0.000	explicit hydrogen atom node
)TSV";

}  // namespace

const ContributionTable &builtin_tpsa_table() {
  static const ContributionTable table =
      parse_contribution_table(kTpsaTableText, "builtin tpsa table");
  return table;
}

const ContributionTable &builtin_logp_table() {
  static const ContributionTable table =
      parse_contribution_table(kLogpTableText, "builtin logp table");
  return table;
}

std::string_view builtin_tpsa_table_text() { return kTpsaTableText; }

std::string_view builtin_logp_table_text() { return kLogpTableText; }

}  // namespace moldkl::chem
