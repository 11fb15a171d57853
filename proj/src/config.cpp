#include "orlicz/config.hpp"

#include "orlicz/errors.hpp"
#include "orlicz/report_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace orlicz {
namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

constexpr const char* kModule = "cli_harness";

[[noreturn]] void parse_fail(const std::string& key, const std::string& what) {
    throw ParseError(kModule, key + ": " + what);
}

[[noreturn]] void range_fail(const std::string& key, const std::string& what) {
    throw RangeError(kModule, key + ": " + what);
}

/// One INI section. Every key read is marked; finish() rejects the rest.
class Section {
public:
    Section(std::string name, const pt::ptree* tree, fs::path base)
        : name_(std::move(name)), tree_(tree), base_(std::move(base)) {}

    bool present() const { return tree_ != nullptr; }
    std::string key(const std::string& k) const { return name_ + "." + k; }

    std::optional<std::string> raw(const std::string& k) {
        used_.insert(k);
        if (!tree_) return std::nullopt;
        const auto it = tree_->find(k);
        if (it == tree_->not_found()) return std::nullopt;
        return it->second.data();
    }

    std::string text(const std::string& k) {
        auto v = raw(k);
        if (!v || v->empty()) parse_fail(key(k), "missing required key");
        return *v;
    }

    std::optional<double> opt_number(const std::string& k) {
        const auto v = raw(k);
        if (!v) return std::nullopt;
        return to_number(k, *v);
    }
    double number(const std::string& k) {
        const auto v = opt_number(k);
        if (!v) parse_fail(key(k), "missing required key");
        return *v;
    }
    double number(const std::string& k, double fallback) { return opt_number(k).value_or(fallback); }

    std::optional<int> opt_integer(const std::string& k) {
        const auto v = raw(k);
        if (!v) return std::nullopt;
        return to_integer(k, *v);
    }
    int integer(const std::string& k) {
        const auto v = opt_integer(k);
        if (!v) parse_fail(key(k), "missing required key");
        return *v;
    }
    int integer(const std::string& k, int fallback) { return opt_integer(k).value_or(fallback); }

    bool boolean(const std::string& k, bool fallback) {
        const auto v = raw(k);
        if (!v) return fallback;
        if (*v == "true") return true;
        if (*v == "false") return false;
        parse_fail(key(k), "expected true or false, got '" + *v + "'");
    }

    std::vector<std::string> list(const std::string& k) {
        std::vector<std::string> items;
        const auto v = raw(k);
        if (!v) return items;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) parse_fail(key(k), "empty list item");
            items.push_back(item.substr(b, e - b + 1));
        }
        return items;
    }

    std::optional<fs::path> existing_path(const std::string& k) {
        const auto v = raw(k);
        if (!v) return std::nullopt;
        fs::path p(*v);
        if (p.is_relative()) p = base_ / p;
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) parse_fail(key(k), "file not found: " + p.string());
        std::ifstream probe(p);
        if (!probe) parse_fail(key(k), "file not readable: " + p.string());
        return p;
    }

    fs::path resolve(const std::string& v) const {
        fs::path p(v);
        return p.is_relative() ? base_ / p : p;
    }

    double to_number(const std::string& k, const std::string& v) const {
        double out = 0.0;
        const auto* end = v.data() + v.size();
        const auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
            parse_fail(key(k), "expected a finite number, got '" + v + "'");
        }
        return out;
    }

    int to_integer(const std::string& k, const std::string& v) const {
        long long out = 0;
        const auto* end = v.data() + v.size();
        const auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc() || ptr != end || out < -2147483647LL || out > 2147483647LL) {
            parse_fail(key(k), "expected an integer, got '" + v + "'");
        }
        return static_cast<int>(out);
    }

    void finish() const {
        if (!tree_) return;
        for (const auto& [k, child] : *tree_) {
            if (!used_.count(k)) parse_fail(key(k), "unknown key");
            if (!child.empty()) parse_fail(key(k), "nested values are not supported");
        }
    }

private:
    std::string name_;
    const pt::ptree* tree_;
    fs::path base_;
    std::set<std::string> used_;
};

const std::set<std::string> kCatalogParams{"p", "q", "gamma", "alpha", "beta", "scale"};

NFunctionSpec read_nfunction(Section& s, const std::optional<DomainSpec>& domain) {
    NFunctionSpec spec;
    spec.family = s.text("family");
    const auto dim = s.opt_integer("dim");
    spec.dim = dim.value_or(domain ? std::max(domain->dimension(), 2) : 0);
    if (spec.dim == 0) parse_fail(s.key("dim"), "missing required key (no [domain] to infer it from)");
    if (spec.dim < 2) range_fail(s.key("dim"), "must be at least 2");
    if (spec.family == "tabulated") {
        spec.table = s.existing_path("table");
        if (!spec.table) parse_fail(s.key("table"), "missing required key");
        return spec;
    }
    for (const auto& name : kCatalogParams) {
        if (const auto v = s.opt_number(name)) spec.params[name] = *v;
    }
    return spec;
}

DomainSpec read_domain(Section& s) {
    DomainSpec d;
    d.shape = s.text("shape");
    const int cap = s.integer("max_nodes", static_cast<int>(kDefaultMaxNodes));
    if (cap < 3 || static_cast<std::size_t>(cap) > kDefaultMaxNodes) {
        range_fail(s.key("max_nodes"), "must lie in [3, " + std::to_string(kDefaultMaxNodes) + "]");
    }
    d.max_nodes = static_cast<std::size_t>(cap);
    if (d.shape == "interval") {
        d.a = s.number("a", 0.0);
        d.b = s.number("b", 1.0);
        d.n = s.integer("n");
        if (!(d.a < d.b)) range_fail(s.key("b"), "must exceed a");
        if (d.n < 2) range_fail(s.key("n"), "must be at least 2");
        if (static_cast<std::size_t>(d.n) + 1 > d.max_nodes) range_fail(s.key("n"), "exceeds the node cap");
    } else if (d.shape == "rectangle") {
        d.lx = s.number("lx", 1.0);
        d.ly = s.number("ly", 1.0);
        d.nx = s.integer("nx");
        d.ny = s.integer("ny");
        if (!(d.lx > 0.0)) range_fail(s.key("lx"), "must be positive");
        if (!(d.ly > 0.0)) range_fail(s.key("ly"), "must be positive");
        if (d.nx < 2) range_fail(s.key("nx"), "must be at least 2");
        if (d.ny < 2) range_fail(s.key("ny"), "must be at least 2");
        const double nodes = (d.nx + 1.0) * (d.ny + 1.0);
        if (nodes > static_cast<double>(d.max_nodes)) range_fail(s.key("nx"), "nx x ny exceeds the node cap");
    } else {
        parse_fail(s.key("shape"), "expected interval or rectangle, got '" + d.shape + "'");
    }
    return d;
}

RhsSpec read_rhs(Section& s, int dimension) {
    RhsSpec r;
    if (const auto kind = s.raw("kind")) r.kind = *kind;
    if (r.kind == "const" || r.kind == "sine") {
        r.value = s.number("value", 1.0);
    } else if (r.kind == "singular") {
        r.value = s.number("value", 1.0);
        r.center = s.number("center", 0.0);
        if (dimension == 2) r.center_y = s.number("center_y", 0.0);
        r.exponent = s.number("exponent");
        if (!(r.exponent >= 0.0) || !(r.exponent < dimension)) {
            range_fail(s.key("exponent"), "must lie in [0, dimension) for an integrable source");
        }
    } else if (r.kind == "field") {
        r.file = s.existing_path("file");
        if (!r.file) parse_fail(s.key("file"), "missing required key");
    } else {
        parse_fail(s.key("kind"), "expected const, singular, sine or field, got '" + r.kind + "'");
    }
    return r;
}

void read_solver(Section& s, SolverOptions& o) {
    if (const auto tol = s.opt_number("tol")) {
        if (!(*tol > 0.0)) range_fail(s.key("tol"), "must be positive");
        o.tol = *tol;
    }
    o.eps_start = s.number("eps_start", o.eps_start);
    o.eps_end = s.number("eps_end", o.eps_end);
    o.eps_factor = s.number("eps_factor", o.eps_factor);
    o.armijo = s.number("armijo", o.armijo);
    o.max_halvings = s.integer("max_halvings", o.max_halvings);
    o.max_newton_per_level = s.integer("max_newton_per_level", o.max_newton_per_level);
    o.picard_max_iter = s.integer("picard_max_iter", o.picard_max_iter);
    o.picard_damping = s.number("picard_damping", o.picard_damping);
    o.picard_tol = s.number("picard_tol", o.picard_tol);
    if (!(o.eps_end > 0.0)) range_fail(s.key("eps_end"), "must be positive");
    if (!(o.eps_start >= o.eps_end)) range_fail(s.key("eps_start"), "must be at least eps_end");
    if (!(o.eps_factor > 1.0)) range_fail(s.key("eps_factor"), "must exceed 1");
    if (!(o.armijo > 0.0 && o.armijo < 0.5)) range_fail(s.key("armijo"), "must lie in (0, 0.5)");
    if (o.max_halvings < 0) range_fail(s.key("max_halvings"), "must be nonnegative");
    if (o.max_newton_per_level < 1) range_fail(s.key("max_newton_per_level"), "must be at least 1");
    if (o.picard_max_iter < 1) range_fail(s.key("picard_max_iter"), "must be at least 1");
    if (!(o.picard_damping > 0.0 && o.picard_damping <= 1.0)) {
        range_fail(s.key("picard_damping"), "must lie in (0, 1]");
    }
    if (!(o.picard_tol > 0.0)) range_fail(s.key("picard_tol"), "must be positive");
}

std::vector<int> read_levels(Section& s) {
    const auto items = s.list("levels");
    if (items.empty()) return {1, 2, 4, 8, 16};
    std::vector<int> levels;
    for (const auto& item : items) {
        const int n = s.to_integer("levels", item);
        if (n < 1) range_fail(s.key("levels"), "levels must be positive");
        if (!levels.empty() && n <= levels.back()) range_fail(s.key("levels"), "levels must be strictly ascending");
        levels.push_back(n);
    }
    return levels;
}

MoserSpec read_moser(Section& s) {
    MoserSpec m;
    m.q = s.number("q");
    m.k_max = s.integer("k_max", m.k_max);
    m.mu = s.opt_number("mu");
    if (const auto branch = s.raw("branch")) {
        if (*branch == "ell") {
            m.branch = IndexSelector::ell;
        } else if (*branch == "em") {
            m.branch = IndexSelector::em;
        } else {
            parse_fail(s.key("branch"), "expected ell or em, got '" + *branch + "'");
        }
    }
    m.ladder_q = s.opt_number("ladder_q");
    m.crit_k = s.number("crit_k", m.crit_k);
    m.cutoff_s = s.number("cutoff_s", m.cutoff_s);
    if (!(m.q > 1.0)) range_fail(s.key("q"), "must exceed 1");
    if (m.k_max < 1 || m.k_max > 200) range_fail(s.key("k_max"), "must lie in [1, 200]");
    if (m.mu && !(*m.mu > 0.0)) range_fail(s.key("mu"), "must be positive");
    if (m.ladder_q && !(*m.ladder_q >= 1.0)) range_fail(s.key("ladder_q"), "must be at least 1");
    if (!(m.crit_k > 0.0)) range_fail(s.key("crit_k"), "must be positive");
    if (!(m.cutoff_s > 0.0)) range_fail(s.key("cutoff_s"), "must be positive");
    return m;
}

bool needs(RunKind kind, std::string_view section) {
    const bool solves = kind == RunKind::solve || kind == RunKind::truncate_sequence || kind == RunKind::moser_bound;
    if (section == "run") return true;
    if (section == "nfunction") return solves || kind == RunKind::check_nfunction;
    if (section == "domain" || section == "rhs" || section == "solver") return solves;
    if (section == "truncation") return kind == RunKind::truncate_sequence || kind == RunKind::moser_bound;
    if (section == "moser") return kind == RunKind::moser_bound;
    if (section == "verify") return kind == RunKind::verify;
    if (section == "suite") return kind == RunKind::suite;
    return false;
}

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
    const auto it = root.find(name);
    return it == root.not_found() ? nullptr : &it->second;
}

/// "section.key: " for the given 1-based line, or "" when the line holds no key.
std::string offending_key(std::string_view text, unsigned long line_no) {
    std::istringstream is{std::string(text)};
    std::string line, section;
    for (unsigned long i = 1; std::getline(is, line); ++i) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        if (line[first] == '[' && line[last] == ']') {
            if (i == line_no) return line.substr(first + 1, last - first - 1) + ": ";
            section = line.substr(first + 1, last - first - 1);
            continue;
        }
        if (i != line_no) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) return "";
        auto key = line.substr(first, eq - first);
        key.erase(key.find_last_not_of(" \t") + 1);
        return (section.empty() ? key : section + "." + key) + ": ";
    }
    return "";
}

}  // namespace

std::string_view run_kind_id(RunKind kind) {
    switch (kind) {
        case RunKind::check_nfunction: return "check-nfunction";
        case RunKind::solve: return "solve";
        case RunKind::truncate_sequence: return "truncate-sequence";
        case RunKind::moser_bound: return "moser-bound";
        case RunKind::verify: return "verify";
        case RunKind::suite: return "suite";
    }
    return "unknown";
}

std::optional<RunKind> parse_run_kind(std::string_view id) {
    for (RunKind k : {RunKind::check_nfunction, RunKind::solve, RunKind::truncate_sequence, RunKind::moser_bound,
                      RunKind::verify, RunKind::suite}) {
        if (run_kind_id(k) == id) return k;
    }
    return std::nullopt;
}

RunConfig parse_config(const fs::path& path, std::optional<RunKind> expected_kind) {
    std::ifstream is(path);
    if (!is) throw ParseError(kModule, "config: cannot read " + path.string());
    std::stringstream buffer;
    buffer << is.rdbuf();
    RunConfig cfg = parse_config_text(buffer.str(), path.parent_path(), expected_kind);
    cfg.source = path;
    return cfg;
}

RunConfig parse_config_text(std::string_view text, const fs::path& base_dir, std::optional<RunKind> expected_kind) {
    pt::ptree root;
    try {
        std::istringstream is{std::string(text)};
        pt::read_ini(is, root);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(kModule, offending_key(text, e.line()) + "config line " + std::to_string(e.line()) + ": " +
                                      e.message());
    }
    for (const auto& [name, tree] : root) {
        if (tree.empty()) parse_fail(name, "keys must live inside a [section]");
    }

    RunConfig cfg;
    Section run("run", child(root, "run"), base_dir);
    const auto kind_text = run.raw("kind");
    std::optional<RunKind> kind;
    if (kind_text) {
        kind = parse_run_kind(*kind_text);
        if (!kind) parse_fail("run.kind", "unknown run kind '" + *kind_text + "'");
        if (expected_kind && *kind != *expected_kind) {
            parse_fail("run.kind", "config is for '" + *kind_text + "' but '" +
                                       std::string(run_kind_id(*expected_kind)) + "' was requested");
        }
    } else {
        kind = expected_kind;
    }
    if (!kind) parse_fail("run.kind", "missing required key");
    cfg.kind = *kind;
    if (const auto out = run.raw("output")) cfg.output = run.resolve(*out);
    run.finish();

    for (const auto& [name, tree] : root) {
        (void)tree;
        static const std::set<std::string> known{"run", "nfunction", "domain", "rhs", "solver",
                                                 "truncation", "moser", "verify", "suite"};
        if (!known.count(name)) parse_fail(name, "unknown section");
        if (!needs(cfg.kind, name)) {
            parse_fail(name, "section not used by run kind " + std::string(run_kind_id(cfg.kind)));
        }
    }

    const bool solves = needs(cfg.kind, "domain");
    if (solves) {
        Section s("domain", child(root, "domain"), base_dir);
        if (!s.present()) parse_fail("domain", "missing required section");
        cfg.domain = read_domain(s);
        s.finish();
    }
    if (needs(cfg.kind, "nfunction")) {
        Section s("nfunction", child(root, "nfunction"), base_dir);
        if (!s.present()) parse_fail("nfunction", "missing required section");
        cfg.nfunction = read_nfunction(s, cfg.domain);
        s.finish();
        try {
            (void)build_nfunction(*cfg.nfunction);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            range_fail("nfunction", e.what());
        }
    }
    if (solves) {
        Section s("rhs", child(root, "rhs"), base_dir);
        if (!s.present()) parse_fail("rhs", "missing required section");
        cfg.rhs = read_rhs(s, cfg.domain->dimension());
        s.finish();
        Section solver("solver", child(root, "solver"), base_dir);
        read_solver(solver, cfg.solver);
        solver.finish();
    }
    if (needs(cfg.kind, "truncation")) {
        Section s("truncation", child(root, "truncation"), base_dir);
        cfg.levels = read_levels(s);
        s.finish();
    }
    if (cfg.kind == RunKind::moser_bound) {
        Section s("moser", child(root, "moser"), base_dir);
        if (!s.present()) parse_fail("moser", "missing required section");
        cfg.moser = read_moser(s);
        s.finish();
        const NFunction nf = build_nfunction(*cfg.nfunction);
        const int N = cfg.domain->dimension();
        if (nf.dim() != N) range_fail("nfunction.dim", "must equal the domain dimension for moser-bound");
        const double exponent = cfg.moser->branch == IndexSelector::ell ? nf.ell() : nf.em();
        if (!(exponent < N)) range_fail("moser.branch", "index must be below the dimension");
        if (!(cfg.moser->q > N / exponent)) {
            range_fail("moser.q", "must exceed N / index = " + format_double(N / exponent) +
                                       " (delta <= 1 otherwise)");
        }
    }
    if (cfg.kind == RunKind::verify) {
        Section s("verify", child(root, "verify"), base_dir);
        if (!s.present()) parse_fail("verify", "missing required section");
        VerifySpec v;
        const auto field = s.existing_path("field");
        const auto bound = s.existing_path("bound");
        if (!field) parse_fail("verify.field", "missing required key");
        if (!bound) parse_fail("verify.bound", "missing required key");
        v.field = *field;
        v.bound = *bound;
        cfg.verify = v;
        s.finish();
    }
    if (cfg.kind == RunKind::suite) {
        Section s("suite", child(root, "suite"), base_dir);
        for (const auto& item : s.list("entries")) {
            const fs::path p = s.resolve(item);
            std::error_code ec;
            if (!fs::is_regular_file(p, ec)) parse_fail("suite.entries", "file not found: " + p.string());
            cfg.suite.entries.push_back(p);
        }
        cfg.suite.acceptance = s.boolean("acceptance", true);
        cfg.suite.jobs = s.integer("jobs", cfg.suite.jobs);
        if (cfg.suite.jobs < 1 || cfg.suite.jobs > 64) range_fail("suite.jobs", "must lie in [1, 64]");
        s.finish();
    }
    return cfg;
}

NFunction build_nfunction(const NFunctionSpec& spec) {
    if (spec.family == "tabulated") return NFunction::from_table_file(spec.table->string(), spec.dim);
    return NFunction::from_catalog(spec.family, spec.params, spec.dim);
}

std::shared_ptr<const Mesh> build_mesh(const DomainSpec& spec) {
    if (spec.shape == "interval") return build_interval_mesh(spec.a, spec.b, spec.n);
    return build_rect_mesh(spec.lx, spec.ly, spec.nx, spec.ny, spec.max_nodes);
}

ProblemSpec build_problem(const RunConfig& config, const std::shared_ptr<const Mesh>& mesh, const NFunction& nf) {
    const RhsSpec& rhs = *config.rhs;
    const double value = rhs.value;
    if (rhs.kind == "const") {
        return ProblemSpec::with_source(mesh, nf, [value](double, double) { return value; });
    }
    if (rhs.kind == "sine") {
        const bool two_d = mesh->dimension() == 2;
        return ProblemSpec::with_source(mesh, nf, [value, two_d](double x, double y) {
            const double sx = std::sin(std::numbers::pi * x);
            return value * (two_d ? sx * std::sin(std::numbers::pi * y) : sx);
        });
    }
    if (rhs.kind == "singular") {
        const double cx = rhs.center;
        const double cy = rhs.center_y;
        const double ex = rhs.exponent;
        const bool two_d = mesh->dimension() == 2;
        return ProblemSpec::with_source(mesh, nf, [=](double x, double y) {
            const double d = two_d ? std::hypot(x - cx, y - cy) : std::abs(x - cx);
            return value * std::pow(d, -ex);
        });
    }
    const std::vector<double> values = read_field_values(*rhs.file);
    if (values.size() != mesh->num_nodes()) {
        throw ValidationError(kModule, "rhs.file: field has " + std::to_string(values.size()) +
                                           " values but the mesh has " + std::to_string(mesh->num_nodes()) +
                                           " nodes");
    }
    return ProblemSpec::with_field(mesh, nf,
                                   Field(mesh, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                                 static_cast<Eigen::Index>(values.size()))));
}

}  // namespace orlicz
