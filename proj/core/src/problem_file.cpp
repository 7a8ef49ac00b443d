#include "fkpde/problem_file.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fkpde {

namespace {

struct KeyValues {
    std::map<std::string, std::string> kv;  // "section.key" -> value

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    const std::string& get(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument("problem file: missing key " + k);
        return it->second;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

KeyValues tokenize(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("problem file: expected key = value, got: " + line);
        out.kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::vector<double> numbers(const std::vector<std::string>& ws, std::size_t from) {
    std::vector<double> out;
    for (std::size_t i = from; i < ws.size(); ++i) out.push_back(std::stod(ws[i]));
    return out;
}

ScalarField parse_scalar(const std::string& spec, int dim, const std::string& what) {
    const auto ws = words(spec);
    if (ws.empty()) throw std::invalid_argument("problem file: empty field " + what);
    const auto p = numbers(ws, 1);
    if (ws[0] == "zero") return ScalarField::zero();
    if (ws[0] == "const") {
        if (p.size() != 1) throw std::invalid_argument(what + ": const needs one value");
        return ScalarField::constant(p[0]);
    }
    if (ws[0] == "linear") {
        if (p.size() != static_cast<std::size_t>(dim) + 1)
            throw std::invalid_argument(what + ": linear needs c0 plus one slope per dimension");
        return ScalarField::linear(p[0], Vec(p.begin() + 1, p.end()));
    }
    if (ws[0] == "product") return ScalarField::product();
    if (ws[0] == "exp_bilinear") {
        if (dim != 2 || p.size() != 1)
            throw std::invalid_argument(what + ": exp_bilinear needs d = 2 and one parameter");
        return ScalarField::exp_bilinear(p[0]);
    }
    throw std::invalid_argument(what + ": unknown scalar form " + ws[0]);
}

}  // namespace

PdeProblem parse_problem_text(const std::string& text) {
    const KeyValues f = tokenize(text);
    PdeProblem pb;
    pb.dim = static_cast<int>(std::stol(f.get("problem.dimension")));
    if (f.has("problem.name")) pb.name = f.get("problem.name");

    // Diffusion: diagonal sigma entries (one value broadcasts).
    {
        const auto ws = words(f.get("coefficients.sigma"));
        if (ws.empty() || ws[0] != "const")
            throw std::invalid_argument("sigma: only 'const s1 [.. sd]' is file-representable");
        auto p = numbers(ws, 1);
        if (p.size() == 1) p.assign(static_cast<std::size_t>(pb.dim), p[0]);
        pb.diffusion = DiffusionField::diag_const(Vec(p.begin(), p.end()));
    }

    // Drift.
    {
        const auto ws = words(f.get("coefficients.drift"));
        const auto p = numbers(ws, 1);
        if (ws[0] == "zero") {
            pb.drift = DriftField::zero();
        } else if (ws[0] == "const") {
            if (p.size() != static_cast<std::size_t>(pb.dim))
                throw std::invalid_argument("drift: const needs one value per dimension");
            pb.drift = DriftField::constant(Vec(p.begin(), p.end()));
        } else if (ws[0] == "grad_exp_bilinear") {
            if (pb.dim != 2 || p.size() != 1)
                throw std::invalid_argument("drift: grad_exp_bilinear needs d = 2, one parameter");
            pb.drift = DriftField::grad_exp_bilinear(p[0]);
        } else {
            throw std::invalid_argument("drift: unknown form " + ws[0]);
        }
    }

    pb.kill = f.has("coefficients.kill") ? parse_scalar(f.get("coefficients.kill"), pb.dim, "kill")
                                         : ScalarField::zero();
    pb.initial = parse_scalar(f.get("coefficients.initial"), pb.dim, "initial");

    // Domain and per-face boundary data.
    if (f.has("domain.lower")) {
        DirichletBc bc;
        auto lo = numbers(words(f.get("domain.lower")), 0);
        auto hi = numbers(words(f.get("domain.upper")), 0);
        if (lo.size() == 1 && pb.dim > 1) lo.assign(static_cast<std::size_t>(pb.dim), lo[0]);
        if (hi.size() == 1 && pb.dim > 1) hi.assign(static_cast<std::size_t>(pb.dim), hi[0]);
        bc.domain = Hyperrectangle(Vec(lo.begin(), lo.end()), Vec(hi.begin(), hi.end()));
        for (int k = 1; k <= pb.dim; ++k) {
            bc.g_lo.push_back(
                parse_scalar(f.get("coefficients.g_lower_" + std::to_string(k)), pb.dim, "g"));
            bc.g_hi.push_back(
                parse_scalar(f.get("coefficients.g_upper_" + std::to_string(k)), pb.dim, "g"));
        }
        pb.dirichlet = std::move(bc);
    }

    // Killing-rate global bounds: derivable for constants, required otherwise.
    if (f.has("bounds.kill")) {
        const auto p = numbers(words(f.get("bounds.kill")), 0);
        if (p.size() != 2) throw std::invalid_argument("bounds.kill needs 'lo hi'");
        pb.kill_lo = p[0];
        pb.kill_hi = p[1];
    } else if (pb.kill.form == ScalarForm::zero) {
        pb.kill_lo = pb.kill_hi = 0.0;
    } else if (pb.kill.form == ScalarForm::constant) {
        pb.kill_lo = pb.kill_hi = pb.kill.p[0];
    } else {
        throw std::invalid_argument("problem file: non-constant kill needs [bounds] kill = lo hi");
    }

    pb.validate();
    return pb;
}

PdeProblem parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("problem file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

}  // namespace fkpde
