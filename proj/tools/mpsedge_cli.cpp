// mpsedge command line front end
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpsedge/mpsedge.hpp"

namespace fs = std::filesystem;
using namespace mpsedge;
using io::json;

namespace {

struct RunConfig {
    std::string command;
    std::string input;
    std::string h0, h1;
    std::string ops;
    int m = 2;
    int l = 1;
    int n_min = 2;
    int n_max = 6;
    int t_steps = 11;
    int l_max = 8;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out = ".";
    std::string direction = "R";

    json to_json() const
    {
        return {{"command", command}, {"input", input}, {"h0", h0}, {"h1", h1}, {"ops", ops}, {"m", m}, {"l", l},
                {"N_min", n_min}, {"N_max", n_max}, {"t_steps", t_steps}, {"l_max", l_max}, {"tol", tol},
                {"seed", seed}, {"format", format}, {"out", out}, {"direction", direction}};
    }
};

// tuple, ClassA file (its B), or anything with "matrices"
MpsTuple load_any_tuple(const std::string& path)
{
    json j = io::read_json(path);
    if (j.is_object() && j.contains("kR")) return io::parse_classa(j).B;
    return io::parse_tuple(j);
}

// interaction file, or a tuple / ClassA file turned into its parent interaction of range m
Interaction load_any_interaction(const std::string& path, int m)
{
    json j = io::read_json(path);
    if (j.is_object() && j.contains("h")) return io::parse_interaction(j);
    if (j.is_object() && j.contains("kR")) return parent_interaction(io::parse_classa(j).B, m);
    return parent_interaction(io::parse_tuple(j), m);
}

std::vector<int> n_range(const RunConfig& c)
{
    require(c.n_min <= c.n_max, ErrorKind::InvalidArgument, "N-min exceeds N-max");
    std::vector<int> r;
    for (int N = c.n_min; N <= c.n_max; ++N) r.push_back(N);
    return r;
}

Direction parse_direction(const std::string& s)
{
    require(s == "R" || s == "L", ErrorKind::InvalidArgument, "direction must be R or L");
    return s == "R" ? Direction::R : Direction::L;
}

class Reporter {
public:
    explicit Reporter(const RunConfig& c) : cfg_(c)
    {
        require(c.format == "json" || c.format == "csv", ErrorKind::InvalidArgument, "format must be csv or json");
        std::error_code ec;
        fs::create_directories(c.out, ec);
        require(!ec, ErrorKind::IoError, "cannot create " + c.out);
    }

    void table(const std::string& name, const io::CsvTable& t)
    {
        if (cfg_.format == "csv") io::write_text((fs::path(cfg_.out) / (name + ".csv")).string(), t.str());
        result_[name] = t.to_json();
    }

    json& result() { return result_; }

    void finish(const std::string& status)
    {
        json rep = {{"version", version}, {"config", cfg_.to_json()}, {"status", status}, {"result", result_}};
        io::write_json((fs::path(cfg_.out) / "report.json").string(), rep);
    }

private:
    RunConfig cfg_;
    json result_ = json::object();
};

void run_analyze(const RunConfig& c, Reporter& r)
{
    MpsTuple v = load_any_tuple(c.input);
    TransferSpectrum s = peripheral_structure(v, c.tol);
    r.result() = io::to_json(s);
    std::cout << "radius " << s.radius << ", period " << s.period << (s.primitive ? ", primitive" : s.irreducible ? ", irreducible" : ", reducible") << "\n";
}

void run_chain(const RunConfig& c, Reporter& r)
{
    MpsTuple v = load_any_tuple(c.input);
    double rad = peripheral_structure(v).radius;
    require(rad > 1e-14, ErrorKind::CornerZero, "transfer map is nilpotent");
    MpsTuple u = v.scaled(1.0 / std::sqrt(rad));
    Mat k0 = minimal_invariant_subspace(u, std::nullopt, c.seed);
    InvariantChain ch = build_chain(u, k0, c.seed);
    json levels = json::array();
    for (int a = 0; a <= ch.k; ++a) levels.push_back(ch.levels[static_cast<size_t>(a)].cols());
    r.result()["k"] = ch.k;
    r.result()["dims"] = levels;
    r.result()["flags"] = chain_flags(u, c.seed);
    try {
        InvariantChain rs = corner_rescale(ch);
        r.result()["radii"] = rs.radii;
        InvariantChain al = align_to_primitive(rs, rs.rescaled.front());
        json ph = json::array();
        for (cplx z : al.phases) ph.push_back(io::to_json(z));
        r.result()["phases"] = ph;
    } catch (const Error& e) {
        r.result()["diagnostic"] = e.what();
        throw;
    }
    std::cout << "chain length k = " << ch.k << "\n";
}

void run_canonicalize(const RunConfig& c, Reporter& r)
{
    MpsTuple v = load_any_tuple(c.input);
    CanonicalResult res = canonicalize(v, c.seed, c.tol);
    r.result()["classa"] = io::to_json(res.data);
    r.result()["match_residual"] = res.match_residual;
    r.result()["c"] = io::to_json(res.c);
    io::write_json((fs::path(c.out) / "classa.json").string(), io::to_json(res.data));
    std::cout << "n0 = " << res.data.n0 << ", kR = " << res.data.kR << ", kL = " << res.data.kL << "\n";
}

void run_validate(const RunConfig& c, Reporter& r)
{
    ClassAData d = io::load_classa(c.input);
    json rows = json::array();
    try {
        ClassAValidation v = validate_classa(d, 1, c.l_max);
        for (const auto& row : v.rows) rows.push_back({{"l", row.l}, {"kernel_dim", row.kernel_dim}, {"model_dim", row.model_dim}});
        r.result() = {{"l0", v.l0}, {"dim", v.dim}, {"expected_dim", v.expected_dim}, {"rows", rows}};
        std::cout << "ClassA: dim " << v.dim << " from l0 = " << v.l0 << "\n";
    } catch (const Error& e) {
        r.result()["diagnostic"] = e.what();
        throw;
    }
}

void run_hamiltonian(const RunConfig& c, Reporter& r)
{
    Interaction h = load_any_interaction(c.input.empty() ? c.h0 : c.input, c.m);
    std::vector<ChainSpectrum> specs;
    json gaps = json::array();
    for (int N : n_range(c)) {
        specs.push_back(chain_spectrum(h, N));
        gaps.push_back({{"N", N}, {"kernel_dim", specs.back().kernel_dim}, {"gap", specs.back().gap}});
    }
    r.table("spectrum", io::spectrum_table(specs));
    r.result()["ground"] = gaps;
    for (const auto& s : specs) std::cout << "N = " << s.N << ": kernel " << s.kernel_dim << ", gap " << s.gap << "\n";
}

std::vector<Mat> load_observables(const std::string& path, int& l)
{
    json j = io::read_json(path);
    l = io::detail::get_int(io::detail::field(j, "", "l"), "/l", 1);
    const json& obs = io::detail::get_array(io::detail::field(j, "", "observables"), "/observables");
    std::vector<Mat> out;
    for (size_t i = 0; i < obs.size(); ++i) out.push_back(io::parse_matrix(obs[i], "/observables/" + std::to_string(i)));
    return out;
}

void run_ltqo(const RunConfig& c, Reporter& r)
{
    MpsTuple v = load_any_tuple(c.input);
    int l = c.l;
    std::vector<Mat> obs = load_observables(c.ops, l);
    LtqoScan s = ltqo_scan(v, obs, l, n_range(c), parse_direction(c.direction));
    r.table("ltqo", io::ltqo_table(s));
    r.result()["fit"] = {{"C1", s.C1}, {"s1", s.s1}, {"skipped", s.fit_skipped}, {"monotone", s.monotone}, {"support_floor", s.support_floor}};
    std::cout << "s1 = " << s.s1 << ", C1 = " << s.C1 << "\n";
}

void run_interpolate(const RunConfig& c, Reporter& r)
{
    Interaction a = load_any_interaction(c.h0, c.m);
    Interaction b = load_any_interaction(c.h1, c.m + 1);
    InterpolationReport rep = interpolation_scan(a, b, uniform_grid(c.t_steps), n_range(c));
    r.table("interp", io::interp_table(rep));
    r.result()["window"] = {{"gamma_star", rep.gamma_star}, {"kernel_max", rep.window_lo}, {"kernel_constant", rep.kernel_constant}};
    std::cout << "gamma* = " << rep.gamma_star << (rep.kernel_constant ? ", kernel constant" : ", kernel varies") << "\n";
}

void run_fcs(const RunConfig& c, Reporter& r)
{
    MpsTuple v = load_any_tuple(c.input);
    json j = io::read_json(c.ops);
    const json& sites = io::detail::get_array(io::detail::field(j, "", "sites"), "/sites");
    std::vector<Mat> ops;
    for (size_t i = 0; i < sites.size(); ++i) ops.push_back(io::parse_matrix(sites[i], "/sites/" + std::to_string(i), v.n(), v.n()));
    FcsTriple f = bulk_triple(v);
    f.direction = parse_direction(c.direction);
    if (f.direction == Direction::L) {
        Reflected rt = reflect_tuple(f.tuple, f.rho);
        f.tuple = rt.tuple;
        f.rho = rt.rho;
    }
    cplx val = fcs_evaluate(f, ops);
    r.result()["value"] = io::to_json(val);
    std::cout << "value " << val.real() << (val.imag() >= 0 ? " + " : " - ") << std::abs(val.imag()) << "i\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mpsedge: transfer maps, invariant chains, ClassA canonical forms and parent Hamiltonians"};
    app.set_config("--config", "", "optional config file; flags take precedence");
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* s) {
        s->add_option("--tol", cfg.tol, "numerical tolerance")->check(CLI::Range(0.0, 1.0));
        s->add_option("--seed", cfg.seed, "seed for randomized subspace searches");
        s->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--out", cfg.out, "output directory");
    };
    auto sizes = [&](CLI::App* s) {
        s->add_option("--N-min", cfg.n_min, "smallest chain length");
        s->add_option("--N-max", cfg.n_max, "largest chain length");
        s->add_option("--m", cfg.m, "parent interaction range when building from a tuple");
    };

    auto* analyze = app.add_subcommand("analyze", "transfer spectrum and primitivity");
    analyze->add_option("--input", cfg.input, "tuple or ClassA JSON")->required();
    common(analyze);
    auto* chain = app.add_subcommand("chain", "invariant subspace chain and corner diagnostics");
    chain->add_option("--input", cfg.input, "tuple or ClassA JSON")->required();
    common(chain);
    auto* canon = app.add_subcommand("canonicalize", "recover ClassA data from a tuple");
    canon->add_option("--input", cfg.input, "tuple JSON")->required();
    common(canon);
    auto* validate = app.add_subcommand("validate", "check a ClassA file against its model space");
    validate->add_option("--input", cfg.input, "ClassA JSON")->required();
    validate->add_option("--l-max", cfg.l_max, "largest word length checked");
    common(validate);
    auto* ham = app.add_subcommand("hamiltonian", "finite chain spectra of a parent interaction");
    ham->add_option("--input,--h0", cfg.input, "interaction, tuple or ClassA JSON")->required();
    sizes(ham);
    common(ham);
    auto* ltqo = app.add_subcommand("ltqo", "edge expectation scan and LTQO fit");
    ltqo->add_option("--input", cfg.input, "tuple or ClassA JSON")->required();
    ltqo->add_option("--ops", cfg.ops, "JSON with l and observables")->required();
    ltqo->add_option("--direction", cfg.direction, "R (left end) or L (right end)");
    sizes(ltqo);
    common(ltqo);
    auto* interp = app.add_subcommand("interpolate", "spectra along (1-t) H0 + t H1");
    interp->add_option("--h0", cfg.h0, "interaction, tuple or ClassA JSON")->required();
    interp->add_option("--h1", cfg.h1, "interaction, tuple or ClassA JSON (range m+1 if built)")->required();
    interp->add_option("--t-steps", cfg.t_steps, "grid points in t")->check(CLI::Range(2, 100000));
    sizes(interp);
    common(interp);
    auto* fcs = app.add_subcommand("fcs", "evaluate the bulk finitely correlated state");
    fcs->add_option("--input", cfg.input, "primitive tuple JSON")->required();
    fcs->add_option("--ops", cfg.ops, "JSON with a list of single-site operators under \"sites\"")->required();
    fcs->add_option("--direction", cfg.direction, "R or L generation");
    common(fcs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    std::unique_ptr<Reporter> rep;
    try {
        rep = std::make_unique<Reporter>(cfg);
        if (cfg.command == "analyze") run_analyze(cfg, *rep);
        else if (cfg.command == "chain") run_chain(cfg, *rep);
        else if (cfg.command == "canonicalize") run_canonicalize(cfg, *rep);
        else if (cfg.command == "validate") run_validate(cfg, *rep);
        else if (cfg.command == "hamiltonian") run_hamiltonian(cfg, *rep);
        else if (cfg.command == "ltqo") run_ltqo(cfg, *rep);
        else if (cfg.command == "interpolate") run_interpolate(cfg, *rep);
        else if (cfg.command == "fcs") run_fcs(cfg, *rep);
        rep->finish("ok");
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool io_error = e.kind() == ErrorKind::SchemaError || e.kind() == ErrorKind::IoError;
        if (rep && !io_error) {
            rep->result()["error"] = e.what();
            try {
                rep->finish(kind_name(e.kind()));
            } catch (const Error&) {
                return 2;
            }
        }
        return io_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
