#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ncsyz/gcs.hpp"
#include "ncsyz/modsyz.hpp"
#include "ncsyz/scenario.hpp"
#include "ncsyz/sympside.hpp"
#include "ncsyz/theta_sections.hpp"

namespace ncsyz {

namespace {

class Acc {
public:
    explicit Acc(std::string name) {
        r_.name = std::move(name);
        r_.details = Json::object();
        r_.details["items"] = Json::object();
    }

    void item(const std::string& key, bool ok, double residual, Json extra = Json::object()) {
        extra["pass"] = ok;
        extra["residual"] = std::isfinite(residual) ? residual : -1.0;
        r_.details["items"][key] = extra;
        if (!ok) failures_.push_back(key);
        if (std::isfinite(residual)) r_.max_residual = std::max(r_.max_residual, residual);
        else failures_.push_back(key + ": non-finite residual");
    }

    void note(const std::string& key, Json value) { r_.details[key] = std::move(value); }

    CheckResult done() {
        r_.pass = failures_.empty();
        r_.details["failures"] = failures_;
        return r_;
    }

private:
    CheckResult r_;
    std::vector<std::string> failures_;
};

Tol tolerance(const Scenario& s) { return Tol{s.tolerance, s.tolerance * 1e-3}; }

Json to_json(const RMat& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        a.push_back(row);
    }
    return a;
}

Json to_json(const IVec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// all integer vectors of length d with entries in [-r, r]
std::vector<IVec> integer_box(int d, int r) {
    std::vector<IVec> out;
    IVec c = IVec::Constant(d, -r);
    while (true) {
        out.push_back(c);
        int i = 0;
        while (i < d && c(i) == r) c(i++) = -r;
        if (i == d) break;
        ++c(i);
    }
    return out;
}

int box_radius(int n) { return n <= 2 ? 2 : 1; }

RVec stacked(const RVec& p, const RVec& q) {
    RVec v(p.size() + q.size());
    v << p, q;
    return v;
}

ModuliPoint shifted(const ModuliPoint& x, const RVec& d) {
    const int n = static_cast<int>(x.p.size());
    ModuliPoint y = x;
    y.p += d.head(n);
    y.q += d.tail(n);
    return y;
}

double point_distance(const ModuliPoint& a, const ModuliPoint& b) {
    return std::max(max_abs(RVec(a.p - b.p)), max_abs(RVec(a.q - b.q)));
}

bool is_square_torus(const CMat& T, const Tol& tol) {
    return max_abs(CMat(T - standard_period(static_cast<int>(T.rows())))) <= tol.abs;
}

bool integral_deformation(const Scenario& s, const Tol& tol) {
    return near_integer(integrality_matrix(s.Acal, s.theta), tol);
}

bool invertible_slope(const RMat& A) { return std::abs(A.determinant()) > 0.5; }

CheckResult check_gcs(const Scenario& s) {
    Acc acc("gcs");
    IdentityParams ip;
    ip.T = s.T;
    ip.theta = s.theta;
    ip.tau = s.tau;
    ip.seed = s.seed;
    ip.samples = s.samples;
    ip.tol = s.tolerance;
    for (const char* name : {"gcs_axioms", "gcs_mirror", "gcs_factorization", "beta_mirror"}) {
        auto rep = verify_identity(name, ip);
        acc.item(name, rep.pass, rep.max_entry_residual);
    }
    return acc.done();
}

CheckResult check_cocycle(const Scenario& s) {
    Acc acc("cocycle");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    auto f = make_factor(FactorKind::nc_twisted, b);
    auto rep = check_cocycle(f, f.star_theta, nullptr, tol);
    acc.item("nc_twisted_cocycle", rep.pass, rep.residual.abs);
    acc.note("integrality_matrix", to_json(rep.integrality));
    acc.note("integral", rep.integral);
    acc.note("deformation_determinant", deformation_determinant(s.Acal, s.theta));
    return acc.done();
}

CheckResult check_connection(const Scenario& s) {
    Acc acc("connection");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    auto f = make_factor(FactorKind::nc_twisted, b);
    auto rep = check_compatibility(f, make_connection(FactorKind::nc_twisted, b), f.star_theta, nullptr, tol);
    acc.item("nc_twisted_compatibility", rep.pass, rep.residual.abs);
    return acc.done();
}

CheckResult check_curvature(const Scenario& s) {
    Acc acc("curvature");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    auto f = make_factor(FactorKind::nc_twisted, b);
    SymbolForm Om = curvature(make_connection(FactorKind::nc_twisted, b), f.star_theta);
    Residual res = residual(Om, curvature_closed_form(FactorKind::nc_twisted, b));
    acc.item("closed_form", res.ok(tol), res.abs);
    auto ob = holomorphicity_obstruction(Om, s.T, tol);
    acc.note("obstruction_vanishes", ob.vanishes);
    return acc.done();
}

CheckResult check_iso(const Scenario& s) {
    Acc acc("iso");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    RMat ata = s.Acal * s.theta * s.Acal;
    bool hypothesis = max_abs(ata) <= tol.window(max_abs(s.Acal) * max_abs(s.Acal));
    acc.note("hypothesis_holds", hypothesis);

    BundleParams flat = b;
    flat.theta.setZero();
    Residual flat_gap = residual(SymbolSum(make_iso(IsoKind::phi_theta_A, flat, tol)),
                             SymbolSum(make_iso(IsoKind::phi_A, flat, tol)));
    acc.item("zero_theta_specialization", flat_gap.abs == 0.0, flat_gap.abs);

    if (hypothesis) {
        BundleParams src = b;
        src.Acal.setZero();
        auto rep = verify_morphism(make_iso(IsoKind::phi_theta_A, b, tol), make_bundle(FactorKind::nc_twisted, src),
                                   make_bundle(FactorKind::nc_twisted, b), b.theta, tol);
        acc.item("phi_theta_A", rep.pass, std::max(rep.automorphy.abs, rep.dbar.abs));
        return acc.done();
    }
    bool rejected = false;
    try {
        make_iso(IsoKind::phi_theta_A, b, tol);
    } catch (const Error& e) {
        rejected = e.code() == ErrorCode::HypothesisViolated;
    }
    acc.item("phi_theta_A_rejected", rejected, 0.0);
    BundleParams src = flat;
    src.Acal.setZero();
    auto rep = verify_morphism(make_iso(IsoKind::phi_A, flat, tol), make_bundle(FactorKind::nc_twisted, src),
                               make_bundle(FactorKind::nc_twisted, flat), flat.theta, tol);
    acc.item("phi_A_at_zero_theta", rep.pass, std::max(rep.automorphy.abs, rep.dbar.abs));
    return acc.done();
}

CheckResult check_morphism(const Scenario& s) {
    Acc acc("morphism");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    ModuliContext ctx{s.A, s.Acal, s.theta};
    int window = box_radius(s.n);
    acc.note("window", window);
    auto x = make_moduli_point(s.p, s.q, Side::holo, ctx);

    auto probe = [&](const std::string& key, const RVec& pp, const RVec& qq) {
        bool equiv = moduli_equiv(x, make_moduli_point(pp, qq, Side::holo, ctx), tol);
        auto sol = solve_hom(b, pp, qq, window, tol, Exec::parallel);
        Json extra{{"equivalent", equiv}, {"found", sol.has_value()}};
        double res = 0.0;
        bool ok = equiv == sol.has_value();
        if (sol) {
            extra["k"] = to_json(sol->k);
            extra["l"] = to_json(sol->l);
            res = std::max(sol->report.automorphy.abs, sol->report.dbar.abs);
            ok = ok && sol->report.pass;
        }
        acc.item(key, ok, res, extra);
    };
    probe("target", s.p_prime, s.q_prime);
    RVec off = s.p_prime;
    off(0) += 0.5;
    probe("half_offset_target", off, s.q_prime);
    return acc.done();
}

CheckResult check_moduli(const Scenario& s) {
    Acc acc("moduli");
    Tol tol = tolerance(s);
    const int n = s.n;
    ModuliContext ctx{s.A, s.Acal, s.theta};
    LatticeBasis L = holo_lattice(s.A, s.Acal, s.theta);
    auto h = make_moduli_point(s.p, s.q, Side::holo, ctx);
    auto x = make_moduli_point(s.p, s.q, Side::symp, ctx);

    // (0.5 e_1, 0) = L (k, l) with k = P^{-t} 0.5 e_1 and l = A^t theta 0.5 e_1
    RVec half = RVec::Zero(2 * n);
    half(0) = 0.5;
    RMat P = moduli_deformation(s.Acal, s.theta);
    RVec k = P.transpose().fullPivLu().solve(RVec(half.head(n)));
    RVec l = s.A.transpose() * s.theta * half.head(n);
    bool half_in_lattice = near_integer(RMat(k), tol) && near_integer(RMat(l), tol);
    acc.note("half_shift_in_holo_lattice", half_in_lattice);

    int bad_holo = 0, bad_symp = 0, bad_canon = 0;
    double worst = 0.0;
    for (const IVec& c : integer_box(2 * n, box_radius(n))) {
        RVec d = L.basis() * c.cast<double>();
        auto y = shifted(h, d);
        worst = std::max(worst, lattice_member(d, L, tol).max_fractional);
        bad_holo += !moduli_equiv(h, y, tol);
        bad_holo += moduli_equiv(h, shifted(y, half), tol) != half_in_lattice;
        auto xs = shifted(x, c.cast<double>());
        bad_symp += !moduli_equiv(x, xs, tol);
        bad_symp += moduli_equiv(x, shifted(xs, half), tol);
        auto cy = canonical(y);
        bad_canon += !moduli_equiv(h, cy, tol) || point_distance(canonical(cy), cy) > tol.window(1.0);
    }
    acc.item("holo_lattice_shifts", bad_holo == 0, worst, {{"disagreements", bad_holo}});
    acc.item("symp_integer_shifts", bad_symp == 0, 0.0, {{"disagreements", bad_symp}});
    acc.item("canonical_representatives", bad_canon == 0, 0.0, {{"disagreements", bad_canon}});
    return acc.done();
}

CheckResult check_syz(const Scenario& s) {
    Acc acc("syz");
    Tol tol = tolerance(s);
    const int n = s.n;
    ModuliContext ctx{s.A, s.Acal, s.theta};
    auto x = make_moduli_point(s.p, s.q, Side::symp, ctx);
    auto h = make_moduli_point(s.p, s.q, Side::holo, ctx);
    ModuliPoint fx = syz_map(x);
    double round_symp = point_distance(syz_map(fx), x);
    double round_holo = point_distance(syz_map(syz_map(h)), h);
    acc.item("inverse_after_forward", round_symp <= tol.window(1.0), round_symp);
    acc.item("forward_after_inverse", round_holo <= tol.window(1.0), round_holo);

    LatticeBasis L = holo_lattice(s.A, s.Acal, s.theta);
    ModuliPoint gh = syz_map(h);
    int bad = 0;
    double worst = 0.0;
    for (const IVec& c : integer_box(2 * n, box_radius(n))) {
        ModuliPoint fy = syz_map(shifted(x, c.cast<double>()));
        RVec d = stacked(RVec(fy.p - fx.p), RVec(fy.q - fx.q));
        auto dec = lattice_member(d, L, tol);
        worst = std::max(worst, dec.max_fractional);
        bad += !dec.inside;
        ModuliPoint gy = syz_map(shifted(h, RVec(L.basis() * c.cast<double>())));
        RVec e = stacked(RVec(gy.p - gh.p), RVec(gy.q - gh.q));
        worst = std::max(worst, integer_distance(RMat(e)));
        bad += !near_integer(RMat(e), tol);
    }
    acc.item("coset_well_defined", bad == 0, worst, {{"disagreements", bad}});
    return acc.done();
}

CheckResult check_sections(const Scenario& s) {
    Acc acc("sections");
    const RMat& A = s.A;
    int det = static_cast<int>(std::lround(A.determinant()));
    auto residues = residue_classes(A);
    acc.item("dimension", static_cast<int>(residues.size()) == det, 0.0,
             {{"det_A", det}, {"dimension", residues.size()}});
    auto ip = intersection_points(A, s.p);
    acc.item("intersection_count", ip.count == det, 0.0, {{"count", ip.count}});
    double tol = std::max(s.tolerance, 1e-8);
    acc.note("section_tolerance", tol);
    for (int r = 0; r < static_cast<int>(residues.size()); ++r) {
        ThetaSection sec = basis_section(A, s.p, s.q, r, 10, s.theta, s.T);
        auto rep = verify_section(sec, s.samples, tol, s.seed + r, Exec::parallel);
        acc.item("basis_" + std::to_string(r), rep.pass, std::max(rep.automorphy_residual, rep.dbar_residual),
                 {{"dbar_checked", rep.dbar_checked}, {"truncation_error", rep.truncation_error}});
    }
    return acc.done();
}

CheckResult check_gerbe(const Scenario& s) {
    Acc acc("gerbe");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    auto rep = verify_gerbe(make_gerbe(GerbeKind::dual_theta, b), tol);
    acc.item("dual_theta", rep.pass, rep.residual.abs);
    auto periods = b_restriction_periods(s.A, make_mirror(s.T, MirrorVariant::nc, s.theta), tol);
    acc.note("b_restriction_periods", to_json(periods.period_matrix));
    acc.note("periods_integral", periods.integral);
    return acc.done();
}

CheckResult check_dual_curvature(const Scenario& s) {
    Acc acc("dual_curvature");
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    auto sys = make_twisted_local_system(b, true, tol);
    auto gerbe = make_gerbe(GerbeKind::dual_theta, b);
    auto lrep = verify_local_system(sys, gerbe, tol);
    acc.item("local_system_cocycle", lrep.cocycle.ok(tol), lrep.cocycle.abs);
    acc.item("local_system_connection", lrep.connection.ok(tol), lrep.connection.abs);
    auto dc = dual_curvature(sys, gerbe, make_mirror(s.T, MirrorVariant::nc, s.theta), tol);
    acc.item("closed_form", dc.residual.ok(tol), dc.residual.abs);
    bool fukaya = fukaya_object_check(s.A, s.T, tol);
    acc.note("fukaya_object", fukaya);
    if (fukaya) acc.item("generalized_condition", dc.generalized_condition_pass, 0.0);
    return acc.done();
}

RMat bfield_change(const CMat& T, const Transform& t) {
    GCStructure IT = build_IT(T);
    return apply_transform(IT, t).J - IT.J;
}

void gerby_suite(Acc& acc, const Scenario& s, FactorKind kind, GerbeKind holo, bool preserved) {
    Tol tol = tolerance(s);
    BundleParams b = scenario_params(s);
    b.A.setZero();
    b.theta.setZero();
    b.Acal.setZero();
    auto f = make_factor(kind, b);
    GerbeDatum g = make_gerbe(holo, b);
    auto grep = verify_gerbe(g, tol);
    acc.item("holo_gerbe", grep.pass, grep.residual.abs);
    auto coc = check_cocycle(f, f.star_theta, &g.alpha, tol);
    acc.item("twisted_cocycle", coc.pass, coc.residual.abs);
    SymbolForm w = make_connection(kind, b);
    auto zc = gerby_zero_connection(kind, b);
    auto comp = check_compatibility(f, w, f.star_theta, &zc, tol);
    acc.item("compatibility", comp.pass, comp.residual.abs);
    SymbolForm gb = gerby_two_form(kind, b);
    SymbolForm Om = curvature(w, f.star_theta, &gb);
    SymbolForm closed = curvature_closed_form(kind, b);
    Residual cres = residual(Om, closed);
    acc.item("curvature_closed_form", cres.ok(tol), cres.abs);
    auto ob = holomorphicity_obstruction(closed, s.T, tol);
    acc.item("obstruction_iff", ob.vanishes == preserved, preserved ? max_abs(ob.matrix) : 0.0,
             {{"obstruction_vanishes", ob.vanishes}, {"condition_holds", preserved}, {"obstruction", max_abs(ob.matrix)}});
}

CheckResult check_tau1(const Scenario& s) {
    Acc acc("tau1");
    Tol tol = tolerance(s);
    bool zero = max_abs(s.tau) == 0.0;
    acc.note("tau_zero", zero);
    double change = max_abs(bfield_change(s.T, bfield_tau1_transform(s.tau)));
    acc.item("preserves_iff_zero", zero ? change == 0.0 : change > 1e-6, zero ? change : 0.0,
             {{"structure_change", change}});
    IdentityParams ip{s.T, s.theta, s.tau, s.seed, s.samples, s.tolerance};
    auto id = verify_identity("tau1_preserve_iff", ip);
    acc.item("tau1_preserve_iff", id.pass, id.max_entry_residual);
    gerby_suite(acc, s, FactorKind::gerby_tau1, GerbeKind::tau1_holo, zero);
    BundleParams b = scenario_params(s);
    auto dual = verify_gerbe(make_gerbe(GerbeKind::tau1_dual, b), tol);
    acc.item("dual_gerbe", dual.pass, dual.residual.abs);
    return acc.done();
}

CheckResult check_tau2(const Scenario& s) {
    Acc acc("tau2");
    Tol tol = tolerance(s);
    CMat tT = s.tau.transpose().cast<cplx>() * s.T;
    bool sym = max_abs(CMat(tT - tT.transpose())) <= tol.window(max_abs(tT));
    acc.note("tauT_symmetric", sym);
    double change = max_abs(bfield_change(s.T, bfield_tau2_transform(s.tau)));
    acc.item("preserves_iff_symmetric", sym ? change <= tol.window(max_abs(s.tau)) : change > 1e-6,
             sym ? change : 0.0, {{"structure_change", change}});
    IdentityParams ip{s.T, s.theta, s.tau, s.seed, s.samples, s.tolerance};
    auto id = verify_identity("tau2_preserve_iff", ip);
    acc.item("tau2_preserve_iff", id.pass, id.max_entry_residual);
    gerby_suite(acc, s, FactorKind::gerby_tau2, GerbeKind::tau2_holo, sym);
    auto L = make_lagrangian(s.A, s.p, s.T, s.tau, tol);
    acc.note("deformed_lagrangian_slope", to_json(L.slope));
    acc.note("deformed_lagrangian_fukaya", L.fukaya);
    return acc.done();
}

CheckResult check_fm(const Scenario& s) {
    Acc acc("fm");
    Tol tol = tolerance(s);
    IdentityParams ip{s.T, s.theta, s.tau, s.seed, s.samples, s.tolerance};
    for (const char* name : {"fm_mirror_compat", "fm_as_bfield"}) {
        auto rep = verify_identity(name, ip);
        acc.item(name, rep.pass, rep.max_entry_residual);
    }
    for (const Transform& t : {fm_complex_transform(s.n), fm_symplectic_transform(s.n)}) {
        GCStructure J = apply_transform(build_IT(s.T), t);
        GcsAxioms ax = gcs_axioms(J);
        double scale = std::max(1.0, max_abs(J.J) * max_abs(J.J));
        double res = std::max(ax.square, ax.pairing);
        acc.item(std::string(transform_kind_name(t.kind)) + "_axioms", tol.ok(res, scale), res);
    }
    auto rep = fm_gerbe_pullback_check(s.A, s.theta, tol);
    acc.item("gerbe_pullback", rep.pass, rep.residual.abs);
    return acc.done();
}

const std::map<std::string, std::function<CheckResult(const Scenario&)>>& registry() {
    static const std::map<std::string, std::function<CheckResult(const Scenario&)>> r = {
        {"cocycle", check_cocycle},   {"connection", check_connection},
        {"curvature", check_curvature}, {"dual_curvature", check_dual_curvature},
        {"fm", check_fm},             {"gcs", check_gcs},
        {"gerbe", check_gerbe},       {"iso", check_iso},
        {"moduli", check_moduli},     {"morphism", check_morphism},
        {"sections", check_sections}, {"syz", check_syz},
        {"tau1", check_tau1},         {"tau2", check_tau2},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

std::string check_inapplicable_reason(const Scenario& s, const std::string& name) {
    Tol tol = tolerance(s);
    if (name == "sections") {
        if (!is_square_torus(s.T, tol)) return "theta sections are implemented for T = iI only";
        if (!is_symmetric(s.A) || !is_positive_definite(s.A)) return "A must be symmetric positive definite";
    }
    if (name == "dual_curvature" && !integral_deformation(s, tol))
        return "the twisted local system needs an integral deformation matrix";
    if ((name == "fm" || name == "sections") && !invertible_slope(s.A)) return "A must be invertible";
    if ((name == "morphism" || name == "moduli" || name == "syz") &&
        std::abs(moduli_deformation(s.Acal, s.theta).determinant()) < 1e-12)
        return "I - (theta Acal / 2pi)^2 is singular";
    if ((name == "tau1" || name == "tau2") && !s.has_tau) return "scenario has no tau";
    if (name == "tau1" && !is_antisymmetric(s.tau)) return "tau1 needs an antisymmetric tau";
    return "";
}

CheckResult run_check(const Scenario& s, const std::string& name) {
    auto it = registry().find(name);
    CheckResult out;
    out.name = name;
    out.details = Json::object();
    if (it == registry().end()) {
        out.details["failures"] = {"unknown check"};
        return out;
    }
    std::string reason = check_inapplicable_reason(s, name);
    if (!reason.empty()) {
        out.details["failures"] = {"not applicable: " + reason};
        return out;
    }
    try {
        return it->second(s);
    } catch (const Error& e) {
        out.details["failures"] = {e.what()};
    }
    return out;
}

}  // namespace ncsyz
