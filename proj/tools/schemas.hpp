#pragma once

// Input schemas printed by `fim <subcommand> --schema`.

namespace fim::cli {

inline const char* kPayoffSchema = R"SCHEMA({
  "type": "call | put | power | tabulated",
  "K": "strike, required for call/put",
  "p": "exponent > 1, required for power",
  "c": "scale >= 0, default 1",
  "delta": "penalty >= 0, default 0",
  "xs": "[increasing positive prices], tabulated only",
  "ys": "[non-negative values], tabulated only"
})SCHEMA";

inline const char* kEnvelopeSchema = R"SCHEMA({
  "pair": {"f1": <payoff>, "f2": <payoff>, "L": 4},
  "s0": 80,
  "domain": [0.1, 1000],
  "n_points": 4096,
  "tol": 1e-9
}
// domain is optional; the default brackets s0 and aligns the grid with the
// payoff kink nearest s0. Output CSV: x,g,dplus,f1,f2,stop_mask.
// <payoff>: run `fim envelope --schema-payoff` equivalent below:
)SCHEMA";

inline const char* kHedgeSchema = R"SCHEMA({
  "pair": {"f1": <payoff>, "f2": <payoff>, "L": 4},
  "s0": 80,
  "rate_is_zero": true,
  "allow_override": false,
  "method": "closed_form | grid (default closed_form for convex pairs)"
}
// Output JSON: {capital, gamma, cash0, exit_lo, exit_hi, assumption_ok,
// override_used}.
)SCHEMA";

inline const char* kModelSchema = R"SCHEMA({
  "type": "heston | hullwhite | scott | roughfou",
  "s0": 80, "r": 0.0, "T": 1.0, "rho": -0.5,
  "kappa": 2.0, "theta": 0.09, "xi": 0.3, "v0": 0.09,
  "u0": "hullwhite/scott start", "lambda": "scott vol scale / rough mean reversion",
  "H": "rough Hurst", "kappa_exp": "rough exponent scale", "nu0": "rough vol start",
  "rate_schedule": [{"until": 0.5, "rate": 0.02}, {"until": 1e308, "rate": 0.04}]
})SCHEMA";

inline const char* kSimulateSchema = R"SCHEMA({
  "model": <model>,
  "n_steps": 512,
  "n_paths": 10000,
  "format": "csv | binary (default csv)"
}
// CSV rows: path,t,S,nu,B,W. Binary: magic FIMPB1, u64 n_times, u64 n_paths,
// u32 n_fields, per field u32 name length + name; then little-endian f64
// arrays: t, B, then per path S, nu, W.
)SCHEMA";

inline const char* kVerifySchema = R"SCHEMA({
  "model": <model>,
  "pair": {"f1": <payoff>, "f2": <payoff>, "L": 4},
  "s0": 80,
  "n_paths": 10000,
  "n_steps": 512,
  "allow_override": false
}
// Output JSON: the super-replication report. --out adds a per-path CSV:
// path,sigma_index,slack_min.
)SCHEMA";

inline const char* kCounterexampleSchema = R"SCHEMA({
  "r": 0.05, "delta": 0.0, "c2": 2.0, "s0": 120,
  "n_paths": 10000, "n_steps": 512
}
// All fields optional; defaults reproduce the negative configuration.
)SCHEMA";

inline const char* kStopvalueSchema = R"SCHEMA({
  "pair": {"f1": <payoff>, "f2": <payoff>, "L": 4},
  "x0": 80,
  "lattice": {"x_min": 1, "x_max": 3000, "n_y": 1200, "u": 1.0,
               "v_lo": 1e-3, "v_hi": 6.0, "n_t": "optional override"}
}
// Output JSON: value at x0. --out dumps the stored surface as CSV:
// t,x,V,feedback_vol.
)SCHEMA";

inline const char* kSemistaticSchema = R"SCHEMA({
  "tree": {"price": 100, "children": [{"price": 80}, {"price": 120}]},
  "claim": {"call_strike": 100} | {"put_strike": 100} | {"payoff": [..per path..]},
  "statics": [{"price": 10, "call_strike": 100}, {"price": 3, "payoff": [...]}],
  "eps": 0.5
}
// Output JSON: dual and primal LP reports; with "eps" also the feasibility
// ball verdict. Paths are enumerated depth-first in child order.
)SCHEMA";

inline const char* kLawdensitySchema = R"SCHEMA({
  "law": {"s0": 100, "T": 1.0, "n": 2,
           "steps": [{"conditionals": [{"given": 100, "support": [80, 120],
                                          "prob": [0.5, 0.5]}]}, ...]},
  "n_samples": 100000,
  "refine": {"sigma": 0.4, "n_list": [4, 8, 16], "n_samples": 20000}
}
// Runs three diagnostics: the chi-square law match for the coupling, the
// grid-time and monotonicity checks of the martingale interpolation, and
// the weak-distance trend for the binomial refinement of geometric
// Brownian motion. Output JSON.
)SCHEMA";

inline const char* kSteerSchema = R"SCHEMA({
  "model": <heston model>,
  "target": {"type": "const"} | {"type": "exp_affine", "a": 0.2, "b": 0.0, "cap": 1.0},
  "n_blocks": 64,
  "eps": 0.05,
  "n_paths": 10000,
  "n_steps": 1024
}
// Output JSON: {prob_exceed, mc_stderr, n_blocks, block_threshold,
// below_threshold}.
)SCHEMA";

} // namespace fim::cli
