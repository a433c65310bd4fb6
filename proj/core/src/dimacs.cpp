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

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "machop/sat.hpp"

namespace machop {

Cnf read_dimacs(std::istream& in) {
  Cnf cnf;
  std::string line;
  std::vector<Lit> pending;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      int nclauses = 0;
      ls >> p >> fmt >> cnf.num_vars >> nclauses;
      if (fmt != "cnf") throw ClauseError("unsupported DIMACS format: " + fmt);
      continue;
    }
    int d;
    while (ls >> d) {
      if (d == 0) {
        cnf.clauses.push_back(make_clause(std::move(pending)));
        pending.clear();
      } else {
        pending.push_back(Lit::from_dimacs(d));
        if (std::abs(d) > cnf.num_vars) cnf.num_vars = std::abs(d);
      }
    }
  }
  if (!pending.empty()) cnf.clauses.push_back(make_clause(std::move(pending)));
  return cnf;
}

void write_dimacs(std::ostream& out, const Cnf& cnf) {
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const Clause& c : cnf.clauses) {
    for (Lit l : c.lits) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

}  // namespace machop
