#include "frtsim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "frtsim/error.hpp"

namespace frtsim {

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& message) {
    const YAML::Mark m = at.Mark();
    if (m.is_null()) throw InputError(message);
    throw InputError(message, m.line + 1, m.column + 1);
}

double number(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    double v = 0.0;
    try {
        v = n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail(n, what + " must be finite");
    return v;
}

std::string text(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
}

bool flag(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(n, what + " must be true or false");
    }
}

Complex complex_pair(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be a [real, imag] pair");
    return {number(n[0], what + "[0]"), number(n[1], what + "[1]")};
}

/// Mapping view that rejects keys nobody asked for.
class Fields {
  public:
    Fields(const YAML::Node& node, std::string context) : node_(node), context_(std::move(context)) {
        if (!node_.IsMap()) fail(node_, context_ + " must be a mapping");
    }

    YAML::Node optional(const std::string& key) {
        used_.insert(key);
        const YAML::Node& n = node_;  // const lookup never inserts
        return n[key];
    }
    YAML::Node required(const std::string& key) {
        YAML::Node n = optional(key);
        if (!n) fail(node_, context_ + " is missing '" + key + "'");
        return n;
    }
    double num(const std::string& key, double fallback) {
        const YAML::Node n = optional(key);
        return n ? number(n, context_ + "." + key) : fallback;
    }
    double num(const std::string& key) { return number(required(key), context_ + "." + key); }
    std::string str(const std::string& key) { return text(required(key), context_ + "." + key); }
    std::string str(const std::string& key, const std::string& fallback) {
        const YAML::Node n = optional(key);
        return n ? text(n, context_ + "." + key) : fallback;
    }
    bool boolean(const std::string& key, bool fallback) {
        const YAML::Node n = optional(key);
        return n ? flag(n, context_ + "." + key) : fallback;
    }
    Complex pair(const std::string& key, Complex fallback) {
        const YAML::Node n = optional(key);
        return n ? complex_pair(n, context_ + "." + key) : fallback;
    }

    /// Call once every expected key has been read.
    void finish() const {
        for (const auto& kv : node_) {
            const std::string key = kv.first.Scalar();
            if (!used_.count(key)) fail(kv.first, "unknown key '" + key + "' in " + context_);
        }
    }

    const YAML::Node& node() const { return node_; }
    const std::string& context() const { return context_; }

  private:
    YAML::Node node_;
    std::string context_;
    std::set<std::string> used_;
};

std::string_view to_string(GainFormula f) {
    return f == GainFormula::Literal ? "literal" : "deadband_consistent";
}

BaseQuantities parse_base(const YAML::Node& n) {
    Fields f(n, "base");
    BaseQuantities base;
    base.s_base_va = f.num("s_base_mva") * 1e6;
    base.f0_hz = f.num("f0_hz", 50.0);
    if (const YAML::Node levels = f.optional("voltage_levels")) {
        if (!levels.IsMap()) fail(levels, "base.voltage_levels must map level name to kV");
        for (const auto& kv : levels) {
            base.v_base_v[kv.first.Scalar()] = number(kv.second, "voltage level '" + kv.first.Scalar() + "'") * 1e3;
        }
    }
    f.finish();
    try {
        base.validate();
    } catch (const Error& e) {
        fail(n, e.what());
    }
    return base;
}

Network parse_network(const YAML::Node& n, const BaseQuantities& base) {
    Fields f(n, "network");
    std::vector<Bus> buses;
    const YAML::Node bus_list = f.required("buses");
    if (!bus_list.IsSequence()) fail(bus_list, "network.buses must be a list");
    for (const auto& b : bus_list) {
        Fields bf(b, "bus");
        Bus bus;
        bus.id = bf.str("id");
        bus.voltage_level = bf.str("level", "");
        if (!bus.voltage_level.empty() && !base.v_base_v.count(bus.voltage_level)) {
            fail(b, "bus '" + bus.id + "' uses undeclared voltage level '" + bus.voltage_level + "'");
        }
        bus.shunt = bf.pair("shunt", {});
        bf.finish();
        buses.push_back(std::move(bus));
    }
    std::vector<Branch> branches;
    if (const YAML::Node br_list = f.optional("branches")) {
        if (!br_list.IsSequence()) fail(br_list, "network.branches must be a list");
        for (const auto& b : br_list) {
            Fields bf(b, "branch");
            Branch br;
            br.id = bf.str("id");
            br.from_bus = bf.str("from");
            br.to_bus = bf.str("to");
            br.series_impedance = {bf.num("r", 0.0), bf.num("x")};
            br.shunt_susceptance = bf.num("b", 0.0);
            br.tap_ratio = bf.num("tap", 1.0);
            br.in_service = bf.boolean("in_service", true);
            bf.finish();
            branches.push_back(std::move(br));
        }
    }
    f.finish();
    try {
        return Network(std::move(buses), std::move(branches));
    } catch (const Error& e) {
        fail(n, e.what());
    }
}

GfmConverter parse_gfm(Fields& f, const BaseQuantities& base) {
    GfmConverter g;
    g.id = f.str("id");
    g.bus = f.str("bus");
    g.s_rated_va = f.num("s_rated_mva") * 1e6;
    g.omega0 = base.omega0();
    g.p_nom = f.num("p_nom", g.p_nom);
    g.p_limit = f.num("p_limit", g.p_limit);
    g.v_mag_ref = f.num("v_ref", g.v_mag_ref);
    g.v_kp = f.num("v_kp", g.v_kp);
    g.v_ki = f.num("v_ki", g.v_ki);
    g.filter_impedance = f.pair("filter_impedance", g.filter_impedance);
    g.p_filter_tau = f.num("p_filter_tau", g.p_filter_tau);
    g.i_limit = f.num("i_limit", g.i_limit);
    g.release_ratio = f.num("release_ratio", g.release_ratio);
    if (!(g.s_rated_va > 0.0)) fail(f.node(), "converter '" + g.id + "': s_rated_mva must be positive");
    if (!(g.p_limit > g.p_nom && g.p_nom > 0.0)) {
        fail(f.node(), "converter '" + g.id + "': need 0 < p_nom < p_limit");
    }
    if (!(g.release_ratio > 0.0 && g.release_ratio < 1.0)) {
        fail(f.node(), "converter '" + g.id + "': release_ratio must lie in (0, 1)");
    }
    if (!(g.i_limit > 0.0)) fail(f.node(), "converter '" + g.id + "': i_limit must be positive");
    if (!(g.p_filter_tau >= 0.0)) fail(f.node(), "converter '" + g.id + "': p_filter_tau must be non-negative");
    g.emf = g.v_mag_ref;
    return g;
}

GflConverter parse_gfl(Fields& f, const BaseQuantities& base) {
    GflConverter g;
    g.id = f.str("id");
    g.bus = f.str("bus");
    const std::string role = f.str("role");
    if (role == "wind_farm") {
        g.role = GflRole::WindFarm;
    } else if (role == "hvdc_link") {
        g.role = GflRole::HvdcLink;
        g.outer_loop_bandwidth = 60.0;
    } else {
        fail(f.optional("role"), "converter '" + g.id + "': role must be wind_farm or hvdc_link");
    }
    g.link_branch = f.str("link_branch", "");
    if (!g.link_branch.empty() && g.role != GflRole::HvdcLink) {
        fail(f.optional("link_branch"), "converter '" + g.id + "': only hvdc_link converters have a link_branch");
    }
    g.s_rated_va = f.num("s_rated_mva") * 1e6;
    if (!(g.s_rated_va > 0.0)) fail(f.node(), "converter '" + g.id + "': s_rated_mva must be positive");

    g.pll = make_pll(base.omega0());
    if (const YAML::Node pn = f.optional("pll")) {
        Fields pf(pn, "converter '" + g.id + "' pll");
        const YAML::Node wn = pf.optional("wn");
        const YAML::Node zeta = pf.optional("zeta");
        const YAML::Node kp = pf.optional("kp");
        const YAML::Node ki = pf.optional("ki");
        if ((wn || zeta) && (kp || ki)) fail(pn, "pll takes either wn/zeta or kp/ki, not both");
        if (wn || zeta) {
            g.pll = make_pll(base.omega0(), wn ? number(wn, "pll.wn") : 150.0, zeta ? number(zeta, "pll.zeta") : 0.707);
        } else {
            if (kp) g.pll.kp = number(kp, "pll.kp");
            if (ki) g.pll.ki = number(ki, "pll.ki");
        }
        g.pll.freeze_below = pf.num("freeze_below", g.pll.freeze_below);
        pf.finish();
        if (!(g.pll.kp > 0.0 && g.pll.ki > 0.0)) fail(pn, "pll gains must be positive");
    }
    if (const YAML::Node on = f.optional("outer_loop")) {
        Fields of(on, "converter '" + g.id + "' outer_loop");
        g.outer_loop_bandwidth = of.num("bandwidth", g.outer_loop_bandwidth);
        g.outer_kp = of.num("kp", g.outer_kp);
        g.v_floor = of.num("v_floor", g.v_floor);
        of.finish();
        if (!(g.outer_loop_bandwidth > 0.0)) fail(on, "outer_loop.bandwidth must be positive");
        if (!(g.v_floor > 0.0)) fail(on, "outer_loop.v_floor must be positive");
    }
    g.i_limit = f.num("i_limit", g.i_limit);
    if (!(g.i_limit > 0.0)) fail(f.node(), "converter '" + g.id + "': i_limit must be positive");
    if (const YAML::Node fn = f.optional("frt")) {
        Fields ff(fn, "converter '" + g.id + "' frt");
        g.v_enter = ff.num("v_enter", g.v_enter);
        g.v_exit = ff.num("v_exit", g.v_exit);
        g.recovery_ramp = ff.num("recovery_ramp", g.recovery_ramp);
        g.p_frt = ff.num("p", g.p_frt);
        g.q_frt = ff.num("q", g.q_frt);
        ff.finish();
        if (!(g.v_exit >= g.v_enter)) fail(fn, "frt.v_exit must not be below frt.v_enter");
        if (!(g.recovery_ramp > 0.0)) fail(fn, "frt.recovery_ramp must be positive");
    }
    return g;
}

Event parse_event(const YAML::Node& n, const ScenarioFile& s) {
    Fields f(n, "event");
    Event e;
    e.time = f.num("t");
    if (e.time < 0.0) fail(n, "event time must be non-negative");
    const std::string type = f.str("type");
    const auto& net = s.input.network;
    auto need_bus = [&](const std::string& key) {
        const std::string bus = f.str(key);
        if (!net.find_bus(bus)) fail(n, "event refers to unknown bus '" + bus + "'");
        return bus;
    };
    auto need_gfl = [&](const std::string& key, bool link_only) {
        const std::string id = f.str(key);
        const auto it = std::find_if(s.input.gfl.begin(), s.input.gfl.end(),
                                     [&](const GflConverter& g) { return g.id == id; });
        if (it == s.input.gfl.end()) fail(n, "event refers to unknown GFL converter '" + id + "'");
        if (link_only && it->role != GflRole::HvdcLink) fail(n, "event target '" + id + "' is not an hvdc_link");
        return id;
    };
    if (type == "ac_fault") {
        ApplyAcFault k;
        k.bus = need_bus("bus");
        k.y_fault = f.pair("y_fault", k.y_fault);
        if (k.y_fault.real() < 0.0) fail(n, "fault admittance must be passive");
        e.kind = k;
    } else if (type == "clear_ac_fault") {
        e.kind = ClearAcFault{need_bus("bus")};
    } else if (type == "dc_fault") {
        DcFault k;
        k.link = need_gfl("link", true);
        k.trip_delay = f.num("trip_delay", k.trip_delay);
        k.ac_dip_shunt = f.pair("ac_dip_shunt", k.ac_dip_shunt);
        if (k.trip_delay < 0.0) fail(n, "trip_delay must be non-negative");
        if (k.ac_dip_shunt.real() < 0.0) fail(n, "ac_dip_shunt must be passive");
        e.kind = k;
    } else if (type == "trip_link") {
        e.kind = TripLink{need_gfl("link", true)};
    } else if (type == "set_dispatch") {
        SetDispatch k;
        k.unit = need_gfl("unit", false);
        k.p_ref = f.num("p");
        k.q_ref = f.num("q", 0.0);
        e.kind = k;
    } else {
        fail(f.optional("type"), "unknown event type '" + type + "'");
    }
    f.finish();
    return e;
}

SimConfig parse_sim(const YAML::Node& n) {
    SimConfig c;
    if (!n) return c;
    Fields f(n, "sim");
    c.dt = f.num("dt", c.dt);
    c.duration = f.num("duration", c.duration);
    const double dec = f.num("decimate", c.decimate);
    c.settle_time = f.num("settle_time", c.settle_time);
    c.settle_tolerance = f.num("settle_tolerance", c.settle_tolerance);
    c.conservation_tolerance = f.num("conservation_tolerance", c.conservation_tolerance);
    c.divergence_voltage = f.num("divergence_voltage", c.divergence_voltage);
    f.finish();
    if (!(c.dt > 0.0 && c.dt <= 1e-3)) fail(n, "sim.dt must lie in (0, 0.001] s");
    if (!(c.duration > 0.0)) fail(n, "sim.duration must be positive");
    if (dec < 1.0 || dec != std::floor(dec) || dec > 1e6) fail(n, "sim.decimate must be a positive integer");
    c.decimate = static_cast<int>(dec);
    if (!(c.settle_time >= 0.0)) fail(n, "sim.settle_time must be non-negative");
    if (!(c.settle_tolerance > 0.0)) fail(n, "sim.settle_tolerance must be positive");
    if (!(c.divergence_voltage > 1.0)) fail(n, "sim.divergence_voltage must exceed 1 pu");
    return c;
}

CoordinationSettings parse_coordination(const YAML::Node& n) {
    CoordinationSettings c;
    if (!n) return c;
    Fields f(n, "coordination");
    c.k_gfm = f.num("k_gfm", c.k_gfm);
    c.auto_gain = f.boolean("auto_gain", c.auto_gain);
    const std::string formula = f.str("gain_formula", "deadband_consistent");
    if (formula == "deadband_consistent") {
        c.gain_formula = GainFormula::DeadbandConsistent;
    } else if (formula == "literal") {
        c.gain_formula = GainFormula::Literal;
    } else {
        fail(f.optional("gain_formula"), "gain_formula must be deadband_consistent or literal");
    }
    const YAML::Node k = f.optional("k_gfl_mw_per_hz");
    if (k) c.k_gfl_mw_per_hz = number(k, "coordination.k_gfl_mw_per_hz");
    f.finish();
    if (!(c.k_gfm > 0.0)) fail(n, "coordination.k_gfm must be positive");
    if (c.k_gfl_mw_per_hz < 0.0) fail(n, "coordination.k_gfl_mw_per_hz must be non-negative");
    return c;
}

VerifySettings parse_verify(const YAML::Node& n) {
    VerifySettings v;
    if (!n) return v;
    Fields f(n, "verify");
    v.frequency_tol_hz = f.num("frequency_tol_hz", v.frequency_tol_hz);
    v.power_rel_tol = f.num("power_rel_tol", v.power_rel_tol);
    v.window_fraction = f.num("window_fraction", v.window_fraction);
    v.stationarity_tol = f.num("stationarity_tol", v.stationarity_tol);
    f.finish();
    if (!(v.frequency_tol_hz > 0.0 && v.power_rel_tol > 0.0 && v.stationarity_tol > 0.0)) {
        fail(n, "verify tolerances must be positive");
    }
    if (!(v.window_fraction > 0.0 && v.window_fraction <= 1.0)) fail(n, "verify.window_fraction must lie in (0, 1]");
    return v;
}

void check_balance(const ScenarioFile& s, const YAML::Node& at) {
    const auto& in = s.input;
    double injected = 0.0;
    for (const auto& g : in.gfl) injected += g.p_ref * g.s_rated_va;
    const double gfm_p = -injected / in.gfm.s_rated_va;  // converter pu, export negative
    if (std::abs(gfm_p) > in.gfm.p_limit) {
        std::ostringstream os;
        os << "dispatch does not balance within GFM capability: GFM would carry " << std::abs(gfm_p)
           << " pu, limit " << in.gfm.p_limit << " pu";
        fail(at, os.str());
    }
    if (s.gfm_dispatch_p && std::abs(*s.gfm_dispatch_p - gfm_p) > 1e-6) {
        std::ostringstream os;
        os << "GFM dispatch " << *s.gfm_dispatch_p << " pu does not balance the GFL dispatch (expected " << gfm_p
           << " pu)";
        fail(at, os.str());
    }
}

}  // namespace

double droop_gain_to_pu(double mw_per_hz, double s_rated_va) {
    // ΔP[pu] = k·Δf[Hz]/S = k/(S·2π)·Δω[rad/s]
    return mw_per_hz * 1e6 / (s_rated_va * 2.0 * std::numbers::pi);
}

DispatchPlan dispatch_plan(const ScenarioFile& s) {
    const auto& in = s.input;
    DispatchPlan plan;
    plan.k_gfm = s.coordination.k_gfm;
    plan.f0_hz = in.base.f0_hz;
    plan.p_gfm_nom_mw = in.gfm.p_nom * in.gfm.s_rated_va / 1e6;
    plan.overload_factor = in.gfm.p_limit / in.gfm.p_nom;
    double total_wf = 0.0;
    plan.n_wf = 0;
    for (const auto& g : in.gfl) {
        const double p_mw = g.p_ref * g.s_rated_va / 1e6;
        if (g.role == GflRole::WindFarm) {
            ++plan.n_wf;
            plan.wf_dispatch_mw.push_back(p_mw);
            total_wf += p_mw;
        } else {
            if (p_mw > 0.0) throw ArgumentError("link '" + g.id + "' imports power; planning assumes exporting links");
            plan.links.push_back({g.id, -p_mw});
            plan.p_exp_mw += -p_mw;
        }
    }
    plan.p_gfm_0_mw = total_wf - plan.p_exp_mw;
    plan.validate();
    return plan;
}

void apply_coordination(ScenarioFile& s) {
    if (s.coordination.auto_gain) {
        s.coordination.k_gfl_mw_per_hz = compute_gfl_droop_gain(dispatch_plan(s), s.coordination.gain_formula);
    }
    s.input.gfm.k_gfm = s.coordination.k_gfm;
    for (auto& g : s.input.gfl) {
        g.k_gfl = g.role == GflRole::WindFarm ? droop_gain_to_pu(s.coordination.k_gfl_mw_per_hz, g.s_rated_va) : 0.0;
    }
}

double tripped_export_mw(const ScenarioFile& s) {
    std::set<std::string> tripped;
    for (const auto& e : s.input.events) {
        if (const auto* d = std::get_if<DcFault>(&e.kind)) tripped.insert(d->link);
        if (const auto* t = std::get_if<TripLink>(&e.kind)) tripped.insert(t->link);
    }
    double total = 0.0;
    for (const auto& g : s.input.gfl) {
        if (tripped.count(g.id) && g.p_ref < 0.0) total += -g.p_ref * g.s_rated_va / 1e6;
    }
    return total;
}

ScenarioFile parse_scenario(std::string_view text_in, std::vector<std::string>* warnings) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text_in));
    } catch (const YAML::ParserException& e) {
        throw InputError("YAML syntax error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root.IsMap()) throw InputError("scenario must be a YAML mapping", 1, 1);
    Fields top(root, "scenario");

    ScenarioFile s;
    const YAML::Node ver = top.required("schema_version");
    const double version = number(ver, "schema_version");
    if (version != kSchemaVersion) {
        fail(ver, "unsupported schema_version " + ver.Scalar() + " (this build reads version " +
                      std::to_string(kSchemaVersion) + ")");
    }
    s.schema_version = kSchemaVersion;

    if (const YAML::Node md = top.optional("metadata")) {
        Fields f(md, "metadata");
        s.metadata.name = f.str("name", "");
        s.metadata.description = f.str("description", "");
        f.finish();
    }
    s.input.base = parse_base(top.required("base"));
    s.input.network = parse_network(top.required("network"), s.input.base);

    // converters
    const YAML::Node conv = top.required("converters");
    if (!conv.IsSequence()) fail(conv, "converters must be a list");
    int gfm_count = 0;
    std::set<std::string> ids;
    for (const auto& c : conv) {
        Fields f(c, "converter");
        const std::string mode = f.str("mode");
        if (mode == "gfm") {
            ++gfm_count;
            if (gfm_count > 1) fail(c, "exactly one GFM required (two GFM converters declared)");
            s.input.gfm = parse_gfm(f, s.input.base);
        } else if (mode == "gfl") {
            s.input.gfl.push_back(parse_gfl(f, s.input.base));
        } else {
            fail(f.optional("mode"), "converter mode must be gfm or gfl");
        }
        f.finish();
        const std::string& id = mode == "gfm" ? s.input.gfm.id : s.input.gfl.back().id;
        const std::string& bus = mode == "gfm" ? s.input.gfm.bus : s.input.gfl.back().bus;
        if (!ids.insert(id).second) fail(c, "converter id '" + id + "' declared twice");
        if (!s.input.network.find_bus(bus)) fail(c, "converter '" + id + "' sits on unknown bus '" + bus + "'");
        if (mode == "gfl") {
            const auto& link = s.input.gfl.back().link_branch;
            if (!link.empty()) {
                const auto bi = s.input.network.find_branch(link);
                if (!bi) fail(c, "converter '" + id + "' names unknown link_branch '" + link + "'");
                const auto& br = s.input.network.branches()[*bi];
                if (br.from_bus != bus && br.to_bus != bus) {
                    fail(c, "link_branch '" + link + "' does not touch bus '" + bus + "'");
                }
            }
        }
    }
    if (gfm_count == 0) fail(conv, "exactly one GFM required");

    // dispatch
    if (const YAML::Node disp = top.optional("dispatch")) {
        if (!disp.IsMap()) fail(disp, "dispatch must map converter id to {p, q}");
        for (const auto& kv : disp) {
            const std::string id = kv.first.Scalar();
            Fields f(kv.second, "dispatch." + id);
            const double p = f.num("p");
            const double q = f.num("q", 0.0);
            f.finish();
            if (id == s.input.gfm.id) {
                if (q != 0.0) fail(kv.second, "GFM reactive power follows from its voltage reference; omit q");
                s.gfm_dispatch_p = p;
                continue;
            }
            auto it = std::find_if(s.input.gfl.begin(), s.input.gfl.end(),
                                   [&](const GflConverter& g) { return g.id == id; });
            if (it == s.input.gfl.end()) fail(kv.first, "dispatch names unknown converter '" + id + "'");
            it->p_ref = p;
            it->q_ref = q;
        }
        check_balance(s, disp);
    } else {
        check_balance(s, root);
    }

    // events
    if (const YAML::Node ev = top.optional("events")) {
        if (!ev.IsSequence()) fail(ev, "events must be a list");
        for (const auto& e : ev) s.input.events.push_back(parse_event(e, s));
        const bool sorted = std::is_sorted(s.input.events.begin(), s.input.events.end(),
                                           [](const Event& a, const Event& b) { return a.time < b.time; });
        if (!sorted) {
            std::stable_sort(s.input.events.begin(), s.input.events.end(),
                             [](const Event& a, const Event& b) { return a.time < b.time; });
            if (warnings) warnings->push_back("events were not in time order; sorted (ties keep declaration order)");
        }
    }

    s.input.config = parse_sim(top.optional("sim"));
    s.coordination = parse_coordination(top.optional("coordination"));
    s.verify = parse_verify(top.optional("verify"));
    top.finish();

    const YAML::Node& croot = root;
    if (!s.coordination.auto_gain && !(croot["coordination"] && croot["coordination"]["k_gfl_mw_per_hz"]) &&
        warnings) {
        warnings->push_back("auto_gain is off and no k_gfl_mw_per_hz given; wind-farm droop disabled");
    }
    try {
        apply_coordination(s);
    } catch (const Error& e) {
        fail(croot["coordination"] ? croot["coordination"] : croot, std::string("coordination: ") + e.what());
    }
    return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), warnings);
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void emit_pair(YAML::Emitter& out, Complex c) {
    out << YAML::Flow << YAML::BeginSeq << num(c.real()) << num(c.imag()) << YAML::EndSeq;
}

}  // namespace

std::string dump_scenario(const ScenarioFile& s) {
    const auto& in = s.input;
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << s.schema_version;

    out << YAML::Key << "metadata" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.metadata.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << s.metadata.description;
    out << YAML::EndMap;

    out << YAML::Key << "base" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "s_base_mva" << YAML::Value << num(in.base.s_base_va / 1e6);
    out << YAML::Key << "f0_hz" << YAML::Value << num(in.base.f0_hz);
    out << YAML::Key << "voltage_levels" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, v] : in.base.v_base_v) out << YAML::Key << name << YAML::Value << num(v / 1e3);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "buses" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : in.network.buses()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << b.id;
        if (!b.voltage_level.empty()) out << YAML::Key << "level" << YAML::Value << b.voltage_level;
        out << YAML::Key << "shunt" << YAML::Value;
        emit_pair(out, b.shunt);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "branches" << YAML::Value << YAML::BeginSeq;
    for (const auto& br : in.network.branches()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << br.id;
        out << YAML::Key << "from" << YAML::Value << br.from_bus;
        out << YAML::Key << "to" << YAML::Value << br.to_bus;
        out << YAML::Key << "r" << YAML::Value << num(br.series_impedance.real());
        out << YAML::Key << "x" << YAML::Value << num(br.series_impedance.imag());
        out << YAML::Key << "b" << YAML::Value << num(br.shunt_susceptance);
        out << YAML::Key << "tap" << YAML::Value << num(br.tap_ratio);
        out << YAML::Key << "in_service" << YAML::Value << br.in_service;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "converters" << YAML::Value << YAML::BeginSeq;
    {
        const auto& g = in.gfm;
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << g.id;
        out << YAML::Key << "mode" << YAML::Value << "gfm";
        out << YAML::Key << "bus" << YAML::Value << g.bus;
        out << YAML::Key << "s_rated_mva" << YAML::Value << num(g.s_rated_va / 1e6);
        out << YAML::Key << "p_nom" << YAML::Value << num(g.p_nom);
        out << YAML::Key << "p_limit" << YAML::Value << num(g.p_limit);
        out << YAML::Key << "v_ref" << YAML::Value << num(g.v_mag_ref);
        out << YAML::Key << "v_kp" << YAML::Value << num(g.v_kp);
        out << YAML::Key << "v_ki" << YAML::Value << num(g.v_ki);
        out << YAML::Key << "filter_impedance" << YAML::Value;
        emit_pair(out, g.filter_impedance);
        out << YAML::Key << "p_filter_tau" << YAML::Value << num(g.p_filter_tau);
        out << YAML::Key << "i_limit" << YAML::Value << num(g.i_limit);
        out << YAML::Key << "release_ratio" << YAML::Value << num(g.release_ratio);
        out << YAML::EndMap;
    }
    for (const auto& g : in.gfl) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << g.id;
        out << YAML::Key << "mode" << YAML::Value << "gfl";
        out << YAML::Key << "role" << YAML::Value << std::string(to_string(g.role));
        out << YAML::Key << "bus" << YAML::Value << g.bus;
        if (!g.link_branch.empty()) out << YAML::Key << "link_branch" << YAML::Value << g.link_branch;
        out << YAML::Key << "s_rated_mva" << YAML::Value << num(g.s_rated_va / 1e6);
        out << YAML::Key << "pll" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "kp" << YAML::Value << num(g.pll.kp);
        out << YAML::Key << "ki" << YAML::Value << num(g.pll.ki);
        out << YAML::Key << "freeze_below" << YAML::Value << num(g.pll.freeze_below);
        out << YAML::EndMap;
        out << YAML::Key << "outer_loop" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "bandwidth" << YAML::Value << num(g.outer_loop_bandwidth);
        out << YAML::Key << "kp" << YAML::Value << num(g.outer_kp);
        out << YAML::Key << "v_floor" << YAML::Value << num(g.v_floor);
        out << YAML::EndMap;
        out << YAML::Key << "i_limit" << YAML::Value << num(g.i_limit);
        out << YAML::Key << "frt" << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "v_enter" << YAML::Value << num(g.v_enter);
        out << YAML::Key << "v_exit" << YAML::Value << num(g.v_exit);
        out << YAML::Key << "recovery_ramp" << YAML::Value << num(g.recovery_ramp);
        out << YAML::Key << "p" << YAML::Value << num(g.p_frt);
        out << YAML::Key << "q" << YAML::Value << num(g.q_frt);
        out << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "dispatch" << YAML::Value << YAML::BeginMap;
    if (s.gfm_dispatch_p) {
        out << YAML::Key << in.gfm.id << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "p" << YAML::Value << num(*s.gfm_dispatch_p) << YAML::EndMap;
    }
    for (const auto& g : in.gfl) {
        out << YAML::Key << g.id << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "p" << YAML::Value << num(g.p_ref);
        out << YAML::Key << "q" << YAML::Value << num(g.q_ref) << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : in.events) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "t" << YAML::Value << num(e.time);
        out << YAML::Key << "type" << YAML::Value;
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ApplyAcFault>) {
                    out << "ac_fault" << YAML::Key << "bus" << YAML::Value << k.bus;
                    out << YAML::Key << "y_fault" << YAML::Value;
                    emit_pair(out, k.y_fault);
                } else if constexpr (std::is_same_v<K, ClearAcFault>) {
                    out << "clear_ac_fault" << YAML::Key << "bus" << YAML::Value << k.bus;
                } else if constexpr (std::is_same_v<K, DcFault>) {
                    out << "dc_fault" << YAML::Key << "link" << YAML::Value << k.link;
                    out << YAML::Key << "trip_delay" << YAML::Value << num(k.trip_delay);
                    out << YAML::Key << "ac_dip_shunt" << YAML::Value;
                    emit_pair(out, k.ac_dip_shunt);
                } else if constexpr (std::is_same_v<K, TripLink>) {
                    out << "trip_link" << YAML::Key << "link" << YAML::Value << k.link;
                } else {
                    out << "set_dispatch" << YAML::Key << "unit" << YAML::Value << k.unit;
                    out << YAML::Key << "p" << YAML::Value << num(k.p_ref);
                    out << YAML::Key << "q" << YAML::Value << num(k.q_ref);
                }
            },
            e.kind);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const auto& c = in.config;
    out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt" << YAML::Value << num(c.dt);
    out << YAML::Key << "duration" << YAML::Value << num(c.duration);
    out << YAML::Key << "decimate" << YAML::Value << c.decimate;
    out << YAML::Key << "settle_time" << YAML::Value << num(c.settle_time);
    out << YAML::Key << "settle_tolerance" << YAML::Value << num(c.settle_tolerance);
    out << YAML::Key << "conservation_tolerance" << YAML::Value << num(c.conservation_tolerance);
    out << YAML::Key << "divergence_voltage" << YAML::Value << num(c.divergence_voltage);
    out << YAML::EndMap;

    out << YAML::Key << "coordination" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "k_gfm" << YAML::Value << num(s.coordination.k_gfm);
    out << YAML::Key << "auto_gain" << YAML::Value << s.coordination.auto_gain;
    out << YAML::Key << "gain_formula" << YAML::Value << std::string(to_string(s.coordination.gain_formula));
    out << YAML::Key << "k_gfl_mw_per_hz" << YAML::Value << num(s.coordination.k_gfl_mw_per_hz);
    out << YAML::EndMap;

    out << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "frequency_tol_hz" << YAML::Value << num(s.verify.frequency_tol_hz);
    out << YAML::Key << "power_rel_tol" << YAML::Value << num(s.verify.power_rel_tol);
    out << YAML::Key << "window_fraction" << YAML::Value << num(s.verify.window_fraction);
    out << YAML::Key << "stationarity_tol" << YAML::Value << num(s.verify.stationarity_tol);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace frtsim
