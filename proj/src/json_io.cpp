#include "gwfock/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gwfock {

Json to_json(const TruncationSpec& spec)
{
    return Json{{"rank", spec.rank},
                {"max_desc", spec.max_desc},
                {"max_degree", spec.max_degree},
                {"max_genus", spec.max_genus},
                {"flow_order", spec.flow_order}};
}

TruncationSpec truncation_from_json(const Json& j)
{
    TruncationSpec spec;
    spec.rank = j.at("rank").get<int>();
    spec.max_desc = j.at("max_desc").get<int>();
    spec.max_degree = j.at("max_degree").get<int>();
    spec.max_genus = j.at("max_genus").get<int>();
    spec.flow_order = j.at("flow_order").get<int>();
    spec.validate();
    return spec;
}

Json to_json(const Monomial& m)
{
    Json factors = Json::array();
    for (const auto& [v, e] : m.factors())
        for (int i = 0; i < e; ++i)
            factors.push_back(Json::array({v.mu, v.k}));
    return factors;
}

Monomial monomial_from_json(const Json& j)
{
    std::vector<Monomial::Factor> factors;
    for (const auto& pair : j)
        factors.push_back({VarIndex{pair.at(0).get<int>(), pair.at(1).get<int>()}, 1});
    return Monomial::from_factors(std::move(factors));
}

namespace {

template <class Frame>
Json poly_to_json(const Poly<Frame>& p)
{
    Json terms = Json::array();
    for (const auto& [m, c] : p.terms())
        terms.push_back(Json{{"monomial", to_json(m)}, {"coeff", to_string(c)}});
    return Json{{"spec", to_json(p.spec())},
                {"frame", std::string(1, Frame::letter)},
                {"terms", std::move(terms)}};
}

template <class Frame>
Poly<Frame> poly_from_json(const Json& j)
{
    std::string frame = j.at("frame").get<std::string>();
    if (frame != std::string(1, Frame::letter))
        throw Error("polynomial frame mismatch: file holds '" + frame + "'");
    Poly<Frame> p(truncation_from_json(j.at("spec")));
    for (const auto& term : j.at("terms")) {
        Monomial m = monomial_from_json(term.at("monomial"));
        if (m.degree() > p.spec().max_degree)
            throw Error("polynomial term exceeds the declared degree cutoff");
        p.add_term(m, parse_rational(term.at("coeff").get<std::string>()));
    }
    return p;
}

MatQ matrix_from_json(const Json& j, int rank)
{
    MatQ m(rank, rank);
    if (static_cast<int>(j.size()) != rank)
        throw Error("matrix: wrong row count");
    for (int r = 0; r < rank; ++r) {
        if (static_cast<int>(j.at(r).size()) != rank)
            throw Error("matrix: wrong column count");
        for (int c = 0; c < rank; ++c)
            m(r, c) = parse_rational(j.at(r).at(c).get<std::string>());
    }
    return m;
}

Json matrix_to_json(const MatQ& m)
{
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(to_string(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

Json to_json(const PolyT& p) { return poly_to_json(p); }
Json to_json(const PolyQ& p) { return poly_to_json(p); }
PolyT poly_t_from_json(const Json& j) { return poly_from_json<TVars>(j); }
PolyQ poly_q_from_json(const Json& j) { return poly_from_json<QVars>(j); }

Json to_json(const Metric& m)
{
    return Json{{"g", matrix_to_json(m.g)}, {"unit_index", m.unit_index}};
}

Metric metric_from_json(const Json& j)
{
    int rank = static_cast<int>(j.at("g").size());
    return Metric::from_matrix(matrix_from_json(j.at("g"), rank), j.at("unit_index").get<int>());
}

Json to_json(const Theory& t)
{
    Json potentials = Json::array();
    for (std::size_t g = 0; g < t.potentials.size(); ++g)
        potentials.push_back(Json{{"genus", g}, {"poly", to_json(t.potentials[g])}});
    return Json{{"spec", to_json(t.spec)},
                {"metric", to_json(t.metric)},
                {"semisimple_claimed", t.semisimple_claimed},
                {"potentials", std::move(potentials)}};
}

Theory theory_from_json(const Json& j)
{
    Theory t{truncation_from_json(j.at("spec")), metric_from_json(j.at("metric")), {}, false};
    t.semisimple_claimed = j.at("semisimple_claimed").get<bool>();
    t.potentials.assign(t.spec.max_genus + 1, PolyT::zero(t.spec));
    for (const auto& entry : j.at("potentials")) {
        int g = entry.at("genus").get<int>();
        if (g < 0 || g > t.spec.max_genus)
            throw Error("theory: genus outside the truncation");
        PolyT p = poly_t_from_json(entry.at("poly"));
        require_same_spec(p.spec(), t.spec);
        t.potentials[g] = std::move(p);
    }
    if (t.metric.rank() != t.spec.rank)
        throw Error("theory: metric rank does not match the truncation");
    return t;
}

Json to_json(const MatrixSeries& m)
{
    Json coeffs = Json::object();
    for (const auto& [j, mat] : m.coeffs)
        coeffs[std::to_string(j)] = matrix_to_json(mat);
    return Json{{"rank", m.rank},
                {"window", Json::array({m.win.lo, m.win.hi})},
                {"coefficients", std::move(coeffs)}};
}

MatrixSeries matrix_series_from_json(const Json& j)
{
    MatrixSeries m;
    m.rank = j.at("rank").get<int>();
    m.win = Window{j.at("window").at(0).get<int>(), j.at("window").at(1).get<int>()};
    for (const auto& [key, mat] : j.at("coefficients").items())
        m.set(std::stoi(key), matrix_from_json(mat, m.rank));
    return m;
}

Json to_json(const FockOperator& op)
{
    Json terms = Json::array();
    for (const auto& [key, c] : op.terms())
        terms.push_back(Json{{"hbar", key.hbar},
                             {"q", to_json(key.qmon)},
                             {"d", to_json(key.dmon)},
                             {"coeff", to_string(c)}});
    return Json{{"spec", to_json(op.spec())}, {"terms", std::move(terms)}};
}

FockOperator fock_operator_from_json(const Json& j)
{
    FockOperator op(truncation_from_json(j.at("spec")));
    for (const auto& term : j.at("terms"))
        op.add_term(term.at("hbar").get<int>(), monomial_from_json(term.at("q")),
                    monomial_from_json(term.at("d")),
                    parse_rational(term.at("coeff").get<std::string>()));
    return op;
}

Json to_json(const CorrelatorTable& table)
{
    Json entries = Json::array();
    for (const auto& [key, value] : table.entries()) {
        Json ks = Json::array();
        for (int k : key.ks)
            ks.push_back(k);
        entries.push_back(
            Json{{"genus", key.genus}, {"ks", std::move(ks)}, {"value", to_string(value)}});
    }
    return Json{{"spec", to_json(table.spec())}, {"entries", std::move(entries)}};
}

std::string correlator_table_text(const CorrelatorTable& table)
{
    std::ostringstream out;
    for (const auto& [key, value] : table.entries()) {
        out << key.genus << "; ";
        for (std::size_t i = 0; i < key.ks.size(); ++i) {
            if (i)
                out << ",";
            out << key.ks[i];
        }
        out << "; " << to_string(value) << "\n";
    }
    return out.str();
}

namespace {

std::string monomial_text(const Monomial& m, char letter)
{
    if (m.is_one())
        return "1";
    std::ostringstream out;
    bool first = true;
    for (const auto& [v, e] : m.factors()) {
        if (!first)
            out << " ";
        first = false;
        out << letter << "[" << v.mu << "," << v.k << "]";
        if (e > 1)
            out << "^" << e;
    }
    return out.str();
}

} // namespace

std::string fock_operator_text(const FockOperator& op)
{
    if (op.is_zero())
        return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, c] : op.terms()) {
        out << (first ? "" : "  +  ") << to_string(c);
        first = false;
        if (key.hbar != 0)
            out << " h^" << key.hbar;
        if (!key.qmon.is_one())
            out << " " << monomial_text(key.qmon, 'q');
        if (!key.dmon.is_one())
            out << " d" << monomial_text(key.dmon, 'q');
    }
    return out.str();
}

Json to_json(const AxiomReport& rep)
{
    Json witnesses = Json::array();
    for (const auto& w : rep.witnesses) {
        Json entry{{"monomial", to_json(w.monomial)},
                   {"lhs", to_string(w.lhs)},
                   {"rhs", to_string(w.rhs)}};
        if (!w.where.empty())
            entry["indices"] = w.where;
        witnesses.push_back(std::move(entry));
    }
    return Json{{"axiom", to_string(rep.id)},
                {"status", to_string(rep.status)},
                {"compared", rep.compared},
                {"witnesses", std::move(witnesses)}};
}

namespace {

const char* to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::undecidable: return "undecidable";
    }
    return "?";
}

} // namespace

Json to_json(const AnnihilationReport& rep)
{
    Json witnesses = Json::array();
    for (const auto& w : rep.witnesses)
        witnesses.push_back(Json{{"hbar_slot", w.hbar_slot},
                                 {"monomial", to_json(w.monomial)},
                                 {"value", to_string(w.value)}});
    return Json{{"status", to_string(rep.status)},
                {"safe_index", rep.safe_index},
                {"safe_degree", rep.safe_degree},
                {"checked", rep.checked},
                {"witnesses", std::move(witnesses)}};
}

Json to_json(const RelationReport& rep)
{
    Json disc = Json::array();
    for (const auto& [key, c] : rep.discrepancy)
        disc.push_back(Json{{"hbar", key.hbar},
                            {"q", to_json(key.qmon)},
                            {"d", to_json(key.dmon)},
                            {"coeff", to_string(c)}});
    return Json{{"status", to_string(rep.status)},
                {"safe_index", rep.safe_index},
                {"discrepancy", std::move(disc)}};
}

Json to_json(const SemisimpleReport& rep)
{
    const char* status = rep.status == SemisimpleStatus::semisimple ? "semisimple"
                         : rep.status == SemisimpleStatus::not_semisimple ? "not_semisimple"
                                                                          : "undecidable";
    Json minpoly = Json::array();
    for (const auto& c : rep.minimal_polynomial)
        minpoly.push_back(to_string(c));
    Json probe = Json::array();
    for (const auto& c : rep.probe)
        probe.push_back(to_string(c));
    return Json{{"status", status},
                {"minimal_polynomial", std::move(minpoly)},
                {"probe", std::move(probe)},
                {"probes_tried", rep.probes_tried}};
}

Json to_json(const JetReport& rep)
{
    Json witnesses = Json::array();
    for (const auto& [g, m] : rep.witnesses)
        witnesses.push_back(Json{{"genus", g}, {"monomial", to_json(m)}});
    return Json{{"ok", rep.ok}, {"witnesses", std::move(witnesses)}};
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        if (!out)
            throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace gwfock
