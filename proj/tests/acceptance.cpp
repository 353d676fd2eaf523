// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "dynsamp/cli/presets.hpp"
#include "dynsamp/cli/report.hpp"
#include "dynsamp/perturb.hpp"
#include "dynsamp/random.hpp"
#include "dynsamp/sampling.hpp"

using namespace dynsamp;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Matrix circulant_shift(Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) m((i + 1) % d, i) = 1.0;
  return m;
}

Matrix nilpotent_shift(Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (Index i = 0; i + 1 < d; ++i) m(i + 1, i) = 1.0;
  return m;
}

// 1. Frame from a positive operator, d = 16.
void criterion_1(Outcome& o) {
  const auto t0 = Clock::now();
  const Index d = 16;
  Matrix t = Matrix::Zero(d, d);
  for (Index k = 1; k <= d; ++k) t(k - 1, k - 1) = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
  const auto f = sampling::frame_from_positive_operator(t, frames::VectorSystem(numkit::identity(d)));
  const double err = (frames::frame_operator(f) - t).cwiseAbs().maxCoeff();
  const double secs = seconds_since(t0);
  o.require(err <= 1e-12, "entrywise error");
  o.require(secs < 1.0, "runtime");
  o.detail << "max error " << err << ", " << secs << " s";
}

// 2. Stein solution against brute-force truncation.
void criterion_2(Outcome& o) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  Index max_n = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    rnd::Rng rng = rnd::substream(2002, seed);
    const Index d = rnd::uniform_int(rng, 1, 8);
    const Matrix t = rnd::with_spectral_radius(d, rnd::uniform(rng, 0.05, 0.9), rng);
    const Vector phi = rnd::gaussian_vector(d, rng);
    Index n = 1;
    while (sampling::truncation_tail_bound(t, phi, n) > 1e-12 && n < (1 << 20)) n *= 2;
    const auto sol = numkit::solve_stein(t, phi * phi.adjoint());
    const Matrix brute = frames::frame_operator(sampling::plain_orbit(t, phi, n + 1));
    const double err = (sol.s - brute).norm();
    worst = std::max(worst, err);
    max_n = std::max(max_n, n);
    o.require(err <= 1e-10, "seed " + std::to_string(seed));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime");
  o.detail << "worst Frobenius error " << worst << ", largest N " << max_n << ", " << secs << " s";
}

// 3. Surjectivity criteria on shift and diagonal families.
void criterion_3(Outcome& o) {
  Index inconsistent = 0;
  double worst_iv = 0.0;
  for (Index d = 2; d <= 8; ++d) {
    const Matrix t = nilpotent_shift(d);
    const Vector phi = numkit::basis_vector(d, 0);
    const auto r = sampling::surjectivity_report(t, phi, sampling::orbit_frame_operator_exact(t, phi).s);
    for (bool v : r.verdicts) o.require(!v, "shift d=" + std::to_string(d) + " reported surjective");
    worst_iv = std::max(worst_iv, r.inverse_sqrt_defect);
    o.require(r.inverse_sqrt_defect <= 1e-10, "criterion (iv) value");
    if (!r.consistent) ++inconsistent;
  }
  Index cases = 0;
  for (std::uint64_t i = 0; cases < 50; ++i) {
    rnd::Rng rng = rnd::substream(3003, i);
    const Index d = rnd::uniform_int(rng, 1, 6);
    const Matrix t = rnd::diagonal_contraction(d, 0.2, 0.9, rng);
    const Vector phi = rnd::unit_vector(d, rng);
    if (sampling::krylov_rank(t, phi) < d) continue;
    ++cases;
    const auto r = sampling::surjectivity_report(t, phi, sampling::orbit_frame_operator_exact(t, phi).s);
    for (bool v : r.verdicts) o.require(v, "diagonal case " + std::to_string(i) + " reported not surjective");
    if (!r.consistent) ++inconsistent;
  }
  o.require(inconsistent == 0, "inconsistencies");
  o.detail << "7 shift + " << cases << " diagonal cases, max shift (iv) " << worst_iv << ", " << inconsistent
           << " inconsistencies";
}

// 4. Periodic model identities.
void criterion_4(Outcome& o) {
  double tst = 0.0, unit = 0.0, sandwich = 0.0;
  for (Index p = 2; p <= 12; ++p) {
    for (int i = 0; i < 20; ++i) {
      rnd::Rng rng = rnd::substream(4004, static_cast<std::uint64_t>(p * 100 + i));
      const auto m = sampling::periodic_orbit_model(circulant_shift(p), rnd::gaussian_vector(p, rng), p,
                                                    static_cast<std::uint64_t>(i), 20);
      const double rel = m.tst_residual / m.s.norm();
      tst = std::max(tst, rel);
      unit = std::max(unit, m.u_unitarity_residual);
      sandwich = std::min({sandwich, m.sandwich_lower_margin, m.sandwich_upper_margin});
      o.require(rel <= 1e-10, "TST* residual p=" + std::to_string(p));
      o.require(m.u_unitarity_residual <= 1e-10, "U unitarity p=" + std::to_string(p));
      o.require(m.sandwich_lower_margin >= -1e-10 && m.sandwich_upper_margin >= -1e-10, "sandwich p=" + std::to_string(p));
    }
  }
  o.detail << "220 cases, max relative TST* residual " << tst << ", max unitarity residual " << unit
           << ", min sandwich margin " << sandwich;
}

// 5. Unitary no-go proxy.
void criterion_5(Outcome& o) {
  double worst = std::numeric_limits<double>::infinity();
  Index cases = 0;
  for (Index d = 1; d <= 6; ++d) {
    for (int kind = 0; kind < 2; ++kind) {
      for (int i = 0; i < 5; ++i) {
        rnd::Rng rng = rnd::substream(5005, static_cast<std::uint64_t>(d * 100 + kind * 10 + i));
        const Matrix u = kind == 0 ? circulant_shift(d) : rnd::unitary(d, rng);
        const Vector phi = rnd::gaussian_vector(d, rng);
        const std::vector<Index> hs = {d, 4 * d, 16 * d};
        const auto b = sampling::unitary_nogo_proxy(u, phi, hs);
        for (std::size_t k = 0; k < hs.size(); ++k) {
          const double margin = b[k] - static_cast<double>(hs[k]) * phi.squaredNorm() / static_cast<double>(d);
          worst = std::min(worst, margin);
          o.require(margin >= -1e-10, "d=" + std::to_string(d));
        }
        ++cases;
      }
    }
  }
  o.detail << cases << " orbits, min margin " << worst;
}

// 6. Ratio bound on weighted orbit frames with N = d.
void criterion_6(Outcome& o) {
  Index cases = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; cases < 50; ++i) {
    rnd::Rng rng = rnd::substream(6006, i);
    const Index d = rnd::uniform_int(rng, 2, 6);
    const Matrix t = rnd::gaussian_matrix(d, d, rng) * rnd::uniform(rng, 0.2, 1.0);
    const Vector phi = rnd::gaussian_vector(d, rng);
    std::vector<Complex> a;
    for (Index n = 0; n < d; ++n) a.push_back(std::polar(std::exp(rnd::uniform(rng, -1.5, 1.5)), rnd::uniform(rng, 0.0, 6.28)));
    const auto sys = sampling::orbit(sampling::OrbitSpec{t, {phi}, sampling::ExplicitWeights{a}, d});
    if (!frames::frame_bounds(sys).is_ambient_frame()) continue;
    ++cases;
    const auto r = sampling::ratio_bound_check(sys);
    worst = std::min(worst, r.margin);
    o.require(r.margin >= -1e-10, "case " + std::to_string(i));
  }
  o.detail << cases << " frames, min margin " << worst;
}

// 7. Lower Riesz decay on overcomplete families.
void criterion_7(Outcome& o) {
  auto check = [&](const Matrix& m, const std::string& name) {
    const auto p = frames::lower_riesz_profile(frames::VectorSystem(m));
    bool monotone = true;
    for (std::size_t i = 1; i < p.size(); ++i) monotone = monotone && p[i] <= p[i - 1] + 1e-15;
    const double ratio = p.back() / p.front();
    o.require(monotone, name + " not non-increasing");
    o.require(ratio <= 0.1, name + " ratio");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << name << " final/initial " << ratio;
  };
  Matrix shift_plus(3, 4);
  shift_plus.leftCols(3) = numkit::identity(3);
  shift_plus.col(3) = numkit::basis_vector(3, 0) + numkit::basis_vector(3, 1);
  check(shift_plus, "shift orbit plus dependent vector");
  Matrix near(2, 2);
  near << 1, 1, 0, 0.1;
  check(near, "near-parallel");
}

// 8. Perturbation certificates on the block-contraction gallery.
void criterion_8(Outcome& o) {
  Matrix t = Matrix::Zero(3, 3);
  t(1, 0) = 1.0;
  t(2, 2) = 0.5;
  const auto cd = perturb::contraction_data(t, numkit::basis_vector(3, 2));
  const Vector phi = numkit::basis_vector(3, 0);
  Index riesz_pos = 0, frame_pos = 0;
  for (int k = 1; k <= 19; ++k) {
    const Vector psi = 0.05 * k * numkit::basis_vector(3, 2);
    const auto r = perturb::riesz_perturbation_certificate(cd, phi, psi, 2);
    if (r.verdict) {
      ++riesz_pos;
      o.require(r.hypothesis_values.at("proof_sum") < 1.0, "riesz proof sum");
      o.require(r.conclusion_check && r.conclusion_check->lower_bound >= r.hypothesis_values.at("floor") - 1e-8,
                "riesz floor");
    }
    const auto w = perturb::weighted_frame_perturbation_certificate(cd, phi, psi, sampling::ConstantWeights{}, 8);
    if (w.verdict) {
      ++frame_pos;
      o.require(w.conclusion_check && w.conclusion_check->lower_bound > 0.0, "weighted lower bound");
      o.require(w.hypothesis_values.count("stable_under_doubling") && w.hypothesis_values.at("stable_under_doubling") == 1.0,
                "weighted stability at t=" + std::to_string(0.05 * k));
    }
  }
  const auto scalar = [](double x) { return perturb::contraction_data(Matrix::Constant(1, 1, x), numkit::identity(1)); };
  const auto two = perturb::two_operator_certificates(scalar(0.5), scalar(0.25), Vector::Ones(1), 64);
  const double expected_sum = 4.0 / 3 - 16.0 / 7 + 16.0 / 15;
  const double sum = two.sum_cert->hypothesis_values.at("sum");
  const double aw = two.sum_cert->conclusion_check ? two.sum_cert->conclusion_check->lower_bound : 0.0;
  o.require(std::abs(sum - expected_sum) <= 1e-12, "two-operator sum");
  o.require(two.sum_cert->verdict && two.sum_cert->conclusion_check->is_ambient_frame(), "two-operator frame");
  o.require(std::abs(aw - 16.0 / 15) <= 1e-12, "two-operator A_W");
  const auto gallery = cli::run_experiment(cli::preset_configs("perturbation-gallery"));
  o.require(gallery.all_passed(), "perturbation-gallery preset");
  o.detail << riesz_pos << " riesz and " << frame_pos << " frame instances with positive margin; two-operator sum "
           << sum << ", A_W " << aw;
}

// 9. Satisfiability search evidence.
void criterion_9(Outcome& o) {
  using perturb::CertificateName;
  const std::uint64_t seed = 9009;
  const auto multi = perturb::satisfiability_search(CertificateName::multi_generator_riesz, 1000, seed);
  const auto frame = perturb::satisfiability_search(CertificateName::two_operator_frame, 1000, seed);
  const auto riesz = perturb::satisfiability_search(CertificateName::riesz_orbit_perturbation, 1000, seed);
  o.require(multi.satisfying_instances.empty(), "multi_generator_riesz satisfiable");
  o.require(frame.satisfying_instances.empty(), "two_operator_frame satisfiable");
  o.require(!riesz.satisfying_instances.empty(), "riesz_orbit_perturbation unsatisfiable");
  const auto again = perturb::satisfiability_search(CertificateName::riesz_orbit_perturbation, 1000, seed, 4);
  bool same = again.satisfying_instances.size() == riesz.satisfying_instances.size();
  for (std::size_t i = 0; same && i < riesz.trials.size(); ++i) {
    const auto &x = riesz.trials[i], &y = again.trials[i];
    same = x.skipped == y.skipped && (x.skipped || x.margin == y.margin);
  }
  o.require(same, "determinism");
  o.detail << "satisfying/skipped of 1000: multi_generator_riesz " << multi.satisfying_instances.size() << "/"
           << multi.skipped << " (max margin " << multi.max_margin << "), two_operator_frame "
           << frame.satisfying_instances.size() << "/" << frame.skipped << " (max margin " << frame.max_margin
           << "), riesz_orbit_perturbation " << riesz.satisfying_instances.size() << "/" << riesz.skipped;
}

// 10. Determinism of the repro command.
void criterion_10(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("dynsamp_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<cli::json> reports;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("report" + std::to_string(run) + ".json");
    const std::string cmd =
        std::string("\"") + DYNSAMP_CLI_PATH + "\" repro aldroubi-diagonal --seed 7 --out \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "exit status");
    std::ifstream in(out);
    cli::json j = in ? cli::json::parse(in, nullptr, false) : cli::json();
    if (j.is_object() && j.contains("checks")) {
      for (auto& c : j["checks"]) c.erase("wall_time_ms");
    }
    reports.push_back(j);
  }
  fs::remove_all(dir);
  const bool equal = reports[0].is_object() && reports[0] == reports[1];
  o.require(equal, "reports differ");
  if (equal) o.detail << "payload_hash " << reports[0]["payload_hash"].get<std::string>();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"frame from positive operator, d = 16", criterion_1},
      {"Stein solution matches truncated sums", criterion_2},
      {"four surjectivity criteria agree", criterion_3},
      {"periodic model identities", criterion_4},
      {"unitary orbit Bessel bounds diverge", criterion_5},
      {"ratio bound on weighted orbit frames", criterion_6},
      {"lower Riesz decay", criterion_7},
      {"perturbation certificates", criterion_8},
      {"satisfiability search", criterion_9},
      {"repro determinism", criterion_10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " ("
              << o.detail.str() << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
