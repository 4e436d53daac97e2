#pragma once

#include "gwfock/axioms.hpp"
#include "gwfock/matrix_series.hpp"
#include "gwfock/poly.hpp"
#include "gwfock/quantize.hpp"
#include "gwfock/tau.hpp"
#include "gwfock/truncation.hpp"
#include "gwfock/virasoro.hpp"

#include <json.hpp>

#include <string>

namespace gwfock {

// All documents use insertion-ordered JSON so identical inputs serialize
// byte-identically.
using Json = nlohmann::ordered_json;

Json to_json(const TruncationSpec& spec);
TruncationSpec truncation_from_json(const Json& j);

Json to_json(const Monomial& m);
Monomial monomial_from_json(const Json& j);

// Polynomials carry their frame tag ("t" or "q"); loading under the wrong
// frame is rejected.
Json to_json(const PolyT& p);
Json to_json(const PolyQ& p);
PolyT poly_t_from_json(const Json& j);
PolyQ poly_q_from_json(const Json& j);

Json to_json(const Metric& m);
Metric metric_from_json(const Json& j);

Json to_json(const Theory& t);
Theory theory_from_json(const Json& j);

Json to_json(const MatrixSeries& m);
MatrixSeries matrix_series_from_json(const Json& j);

Json to_json(const FockOperator& op);
FockOperator fock_operator_from_json(const Json& j);

Json to_json(const CorrelatorTable& table);

// Sorted text lines "g; k1,...,kn; value".
std::string correlator_table_text(const CorrelatorTable& table);

Json to_json(const AxiomReport& rep);
Json to_json(const AnnihilationReport& rep);
Json to_json(const RelationReport& rep);
Json to_json(const SemisimpleReport& rep);
Json to_json(const JetReport& rep);

// Human-readable sum of operator terms, e.g. "-1/2 h^-1 q[0,0]^2".
std::string fock_operator_text(const FockOperator& op);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

} // namespace gwfock
