// Copyright 2026 The machop Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include <gtest/gtest.h>

#include "machop/model.hpp"
#include "support.hpp"

namespace machop {
namespace {

using testing::data_path;

TEST(Sudoku, FourByFourEncodingSizes) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("sudoku4/eval/s4_eval_01.txt"));
  const ClausalCSP& csp = *lp.csp;
  EXPECT_EQ(csp.kind, PuzzleKind::kSudoku);
  EXPECT_EQ(csp.size, 4);
  EXPECT_EQ(csp.num_vars(), 64);
  EXPECT_EQ(csp.num_groups(), 12);
  EXPECT_EQ(csp.decision_vars.size(), 16u);
  EXPECT_EQ(lp.instance.given.size(), 6u);
  EXPECT_EQ(lp.instance.targets.size(), 10u);
  EXPECT_EQ(lp.instance.solution.size(), 16u);
  EXPECT_EQ(lp.instance.puzzle_id, "s4_eval_01");
}

TEST(Sudoku, GroupsComeAsRowsColumnsBlocks) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("sudoku4/eval/s4_eval_01.txt"));
  const auto& g = lp.csp->groups;
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(g[k].category, Category::kRow);
    EXPECT_EQ(g[4 + k].category, Category::kCol);
    EXPECT_EQ(g[8 + k].category, Category::kBlock);
  }
  EXPECT_EQ(g[0].name, "row1");
  EXPECT_EQ(g[11].name, "block4");
  // Each unit holds one exactly-one constraint per value over 4 cells.
  EXPECT_EQ(g[0].scope.size(), 16u);
}

TEST(Sudoku, SolutionAgreesWithGivens) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("sudoku4/eval/s4_eval_01.txt"));
  for (const Fact& f : lp.instance.given) {
    EXPECT_NE(std::find(lp.instance.solution.begin(), lp.instance.solution.end(), f),
              lp.instance.solution.end());
  }
  EXPECT_EQ(count_solutions(*lp.csp, lp.instance.given, 5), 1);
  EXPECT_EQ(count_solutions(*lp.csp, lp.instance.solution, 5), 1);
}

TEST(Sudoku, ParseErrors) {
  EXPECT_THROW(load_sudoku("123"), ParseError);
  EXPECT_THROW(load_sudoku("5..............."), ParseError);
  // Two 1s in the first row.
  EXPECT_THROW(load_sudoku("11.............."), ModelError);
  // Empty grid has many solutions.
  EXPECT_THROW(load_sudoku("................"), ModelError);
}

TEST(Sudoku, ExplainableFactsOfAFullGivenSetAreEmpty) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("sudoku4/eval/s4_eval_01.txt"));
  EXPECT_TRUE(explainable_facts(*lp.csp, lp.instance.solution).empty());
  const auto facts = explainable_facts(*lp.csp, lp.instance.given);
  EXPECT_EQ(facts.size(), lp.instance.targets.size());
}

TEST(Sudoku, NineByNine) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("sudoku9/s9_small_01.txt"));
  EXPECT_EQ(lp.csp->num_vars(), 729);
  EXPECT_EQ(lp.csp->num_groups(), 27);
  EXPECT_EQ(lp.instance.targets.size(), 8u);
}

TEST(LogicGrid, PetsPuzzle) {
  const LoadedPuzzle lp = load_puzzle_file(data_path("logic_grid/pets.lgp"));
  const ClausalCSP& csp = *lp.csp;
  EXPECT_EQ(csp.kind, PuzzleKind::kLogicGrid);
  EXPECT_EQ(csp.num_vars(), 27);  // three pairs of types, 3x3 each
  int bij = 0, trans = 0, clue = 0;
  for (const auto& g : csp.groups) {
    bij += g.category == Category::kBijectivity;
    trans += g.category == Category::kTransitivity;
    clue += g.category == Category::kClue;
  }
  EXPECT_EQ(bij, 18);
  EXPECT_EQ(trans, 27);
  EXPECT_EQ(clue, 5);
  EXPECT_TRUE(lp.instance.given.empty());
  EXPECT_EQ(lp.instance.targets.size(), 27u);
  EXPECT_EQ(count_solutions(csp, {}, 5), 1);

  auto holds = [&](const std::string& name) {
    for (const Fact& f : lp.instance.solution) {
      if (csp.decision_vars[f.variable].name == name) return f.value == 1;
    }
    ADD_FAILURE() << name;
    return false;
  };
  EXPECT_TRUE(holds("assoc(alice,april)"));
  EXPECT_TRUE(holds("assoc(alice,cat)"));
  EXPECT_TRUE(holds("assoc(bob,fish)"));
  EXPECT_TRUE(holds("assoc(carol,june)"));
  EXPECT_FALSE(holds("assoc(carol,fish)"));
}

TEST(LogicGrid, RejectsUnknownEntities) {
  std::istringstream in(
      "types: a b\nentities:\n  a: x y\n  b: p q\ngroup g1 clue:\nassoc(x,zzz)\n");
  EXPECT_THROW(load_logic_grid(in), ParseError);
}

TEST(LogicGrid, RejectsUnknownCategory) {
  std::istringstream in(
      "types: a b\nentities:\n  a: x y\n  b: p q\ngroup g1 hint:\nassoc(x,p)\n");
  EXPECT_THROW(load_logic_grid(in), ParseError);
}

TEST(Categories, SlotsAndNames) {
  EXPECT_EQ(category_slot(Category::kBlock), 0);
  EXPECT_EQ(category_slot(Category::kRow), 1);
  EXPECT_EQ(category_slot(Category::kCol), 2);
  EXPECT_EQ(category_slot(Category::kBijectivity), 0);
  EXPECT_EQ(category_slot(Category::kTransitivity), 1);
  EXPECT_EQ(category_slot(Category::kClue), 2);
  EXPECT_EQ(parse_category("transitivity"), Category::kTransitivity);
  EXPECT_THROW(parse_category("nope"), ParseError);
}

}  // namespace
}  // namespace machop
