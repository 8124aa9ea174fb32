#ifndef MMRT_VALIDATION_HPP
#define MMRT_VALIDATION_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmrt/analysis.hpp"
#include "mmrt/engine.hpp"
#include "mmrt/model.hpp"
#include "mmrt/protocol.hpp"

namespace mmrt {

	struct Range {
		Time lo = 0;
		Time hi = 0;
	};

	struct FuzzConfig {
		std::uint64_t seed = 1;
		std::size_t trials = 100;
		Range n_range{1, 7};
		Range m_range{2, 4};
		Range p_range{1, 20};
		Time max_offset = 20;     // release offsets / inter-arrival jitter
		double shrink_prob = 0.5; // chance that a job's exec_req is reduced
		std::size_t exhaustive_cap = 8;
	};

	inline void check_config(const FuzzConfig& cfg)
	{
		auto bad = [](const Range& r) { return r.lo > r.hi; };
		if (cfg.trials < 1)
			throw Error("fuzz config: trials must be >= 1");
		if (bad(cfg.n_range) || bad(cfg.m_range) || bad(cfg.p_range))
			throw Error("fuzz config: empty range");
		if (cfg.n_range.lo < 0 || cfg.m_range.lo < 1 || cfg.p_range.lo < 0 || cfg.max_offset < 0)
			throw Error("fuzz config: range out of domain");
		if (cfg.shrink_prob < 0.0 || cfg.shrink_prob > 1.0)
			throw Error("fuzz config: shrink probability outside [0, 1]");
	}

	// Seed of trial i of a campaign; reproduces that trial on its own.
	inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
	{
		std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

	class Rng {
	public:
		explicit Rng(std::uint64_t seed) : gen_(seed) {}

		Time uniform(Time lo, Time hi) { return std::uniform_int_distribution<Time>(lo, hi)(gen_); }
		Time uniform(const Range& r) { return uniform(r.lo, r.hi); }
		bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
		std::mt19937_64& engine() { return gen_; }

	private:
		std::mt19937_64 gen_;
	};

	// Jobs ready at time 0, one per processing time, no deadlines.
	inline std::vector<JobInstance> ready_jobs(std::span<const Time> ps)
	{
		std::vector<JobInstance> jobs;
		for (std::size_t i = 0; i < ps.size(); ++i) {
			JobInstance j;
			j.id = "J" + std::to_string(i + 1);
			j.task = j.id;
			j.key = {0, i, 0};
			j.exec_req = ps[i];
			jobs.push_back(std::move(j));
		}
		return jobs;
	}

	struct OracleResult {
		Time max_makespan = 0;
		PriorityAssignment witness_order;
		Rational bound;
		bool holds = true;
		bool exhaustive = true;
		std::size_t orders = 0;
		std::size_t malformed = 0; // simulator outputs failing verify_trace_wellformed
	};

	namespace detail {
		inline void oracle_step(OracleResult& res, std::span<const JobInstance> jobs,
		                        std::vector<std::size_t> order, unsigned m)
		{
			PriorityAssignment prio(std::move(order));
			const auto trace = simulate(jobs, prio, m);
			if (!verify_trace_wellformed(trace, jobs, prio, m).empty())
				++res.malformed;
			const Time ms = trace.makespan().value_or(0);
			if (res.orders == 0 || ms > res.max_makespan) {
				res.max_makespan = ms;
				res.witness_order = prio;
			}
			++res.orders;
		}
	} // namespace detail

	// Maximum simulated makespan over every priority order of the jobs
	// (all ready at 0), compared against upms.
	inline OracleResult brute_force_max_makespan(std::span<const Time> ps, unsigned m,
	                                             std::size_t cap = 8)
	{
		if (ps.size() > cap)
			throw Error("exhaustive cap exceeded (n=" + std::to_string(ps.size()) + ", cap="
			            + std::to_string(cap) + ")");
		const auto jobs = ready_jobs(ps);
		OracleResult res;
		res.bound = upms(ps, m);
		std::vector<std::size_t> order(jobs.size());
		std::iota(order.begin(), order.end(), 0);
		do {
			detail::oracle_step(res, jobs, order, m);
		} while (std::next_permutation(order.begin(), order.end()));
		res.holds = Rational(res.max_makespan) <= res.bound;
		return res;
	}

	// Random priority orders instead of all of them; flagged non-exhaustive.
	inline OracleResult sampled_max_makespan(std::span<const Time> ps, unsigned m,
	                                         std::size_t samples, Rng& rng)
	{
		const auto jobs = ready_jobs(ps);
		OracleResult res;
		res.bound = upms(ps, m);
		res.exhaustive = false;
		std::vector<std::size_t> order(jobs.size());
		std::iota(order.begin(), order.end(), 0);
		for (std::size_t s = 0; s < std::max<std::size_t>(samples, 1); ++s) {
			std::shuffle(order.begin(), order.end(), rng.engine());
			detail::oracle_step(res, jobs, order, m);
		}
		res.holds = Rational(res.max_makespan) <= res.bound;
		return res;
	}

	struct CampaignFailure {
		std::size_t trial = 0;
		std::uint64_t seed = 0; // trial_seed(cfg.seed, trial)
		std::string what;
	};

	struct CampaignSummary {
		std::string name;
		std::size_t trials = 0;
		std::size_t checks = 0;
		std::size_t failures = 0;
		std::size_t malformed = 0;
		std::vector<CampaignFailure> failed;

		bool ok() const { return failures == 0 && malformed == 0; }

		void fail(std::size_t trial, std::uint64_t seed, std::string what)
		{
			++failures;
			if (failed.size() < 20)
				failed.push_back({trial, seed, std::move(what)});
		}
	};

	inline std::string describe(std::span<const Time> ps)
	{
		std::string s = "{";
		for (std::size_t i = 0; i < ps.size(); ++i)
			s += (i ? "," : "") + std::to_string(ps[i]);
		return s + "}";
	}

	inline CampaignSummary verify_bound_fuzz(const FuzzConfig& cfg)
	{
		check_config(cfg);
		CampaignSummary sum;
		sum.name = "bound";
		for (std::size_t t = 0; t < cfg.trials; ++t) {
			const auto seed = trial_seed(cfg.seed, t);
			Rng rng(seed);
			const auto n = static_cast<std::size_t>(rng.uniform(cfg.n_range));
			const auto m = static_cast<unsigned>(rng.uniform(cfg.m_range));
			std::vector<Time> ps(n);
			for (auto& p : ps)
				p = rng.uniform(cfg.p_range);
			const auto res = n <= cfg.exhaustive_cap
			                     ? brute_force_max_makespan(ps, m, cfg.exhaustive_cap)
			                     : sampled_max_makespan(ps, m, 40320, rng);
			++sum.trials;
			sum.checks += res.orders;
			sum.malformed += res.malformed;
			if (!res.holds)
				sum.fail(t, seed,
				         "p=" + describe(ps) + " m=" + std::to_string(m) + ": makespan "
				             + std::to_string(res.max_makespan) + " > upms " + to_string(res.bound));
		}
		return sum;
	}

	// Shrinking exec_reqs under an unchanged priority order never delays any
	// completion.
	inline CampaignSummary verify_predictability(const FuzzConfig& cfg)
	{
		check_config(cfg);
		CampaignSummary sum;
		sum.name = "predictability";
		for (std::size_t t = 0; t < cfg.trials; ++t) {
			const auto seed = trial_seed(cfg.seed, t);
			Rng rng(seed);
			const auto n = static_cast<std::size_t>(rng.uniform(cfg.n_range));
			const auto m = static_cast<unsigned>(rng.uniform(cfg.m_range));
			std::vector<JobInstance> jobs;
			for (std::size_t i = 0; i < n; ++i) {
				JobInstance j;
				j.id = "J" + std::to_string(i + 1);
				j.task = j.id;
				j.key = {0, i, 0};
				j.arrival = rng.uniform(0, cfg.max_offset);
				j.exec_req = rng.uniform(cfg.p_range);
				j.rel_deadline = j.exec_req + rng.uniform(0, cfg.p_range.hi);
				j.abs_deadline = j.arrival + j.rel_deadline;
				jobs.push_back(std::move(j));
			}
			std::vector<std::size_t> order(n);
			std::iota(order.begin(), order.end(), 0);
			std::shuffle(order.begin(), order.end(), rng.engine());
			const PriorityAssignment prio(order);

			auto reduced = jobs;
			for (auto& j : reduced)
				if (rng.chance(cfg.shrink_prob))
					j.exec_req = rng.uniform(0, j.exec_req);

			const auto full = simulate(jobs, prio, m);
			const auto less = simulate(reduced, prio, m);
			sum.malformed += !verify_trace_wellformed(full, jobs, prio, m).empty();
			sum.malformed += !verify_trace_wellformed(less, reduced, prio, m).empty();
			++sum.trials;
			for (const auto& j : jobs) {
				++sum.checks;
				const auto a = full.completions.at(j.id);
				const auto b = less.completions.at(j.id);
				if (b > a) {
					sum.fail(t, seed,
					         j.id + " completes at " + std::to_string(b) + " after reduction, "
					             + std::to_string(a) + " before");
					break;
				}
			}
			if (check_trace_deadlines(full, jobs).all_met && !check_trace_deadlines(less, reduced).all_met)
				sum.fail(t, seed, "reduced job set misses a deadline the original met");
		}
		return sum;
	}

	// Random sporadic releases of a mode: first release in [0, T + max_offset],
	// later ones separated by T plus jitter in [0, max_offset]; exec_req is
	// the WCET or, with probability shrink_prob, uniform in [0, WCET].
	inline ArrivalScenario random_scenario(const Mode& mode, Time horizon, const FuzzConfig& cfg,
	                                       Rng& rng)
	{
		ArrivalScenario sc;
		sc.horizon = horizon;
		sc.releases.resize(mode.tasks.size());
		for (std::size_t i = 0; i < mode.tasks.size(); ++i) {
			const auto& task = mode.tasks[i];
			Time a = rng.uniform(0, task.min_interarrival + cfg.max_offset);
			while (a < horizon) {
				const Time c = rng.chance(cfg.shrink_prob) ? rng.uniform(0, task.wcet) : task.wcet;
				sc.releases[i].push_back({a, c});
				a += task.min_interarrival + rng.uniform(0, cfg.max_offset);
			}
		}
		return sc;
	}

	inline Time max_period(const Mode& mode)
	{
		Time t = 1;
		for (const auto& task : mode.tasks)
			t = std::max(t, task.min_interarrival);
		return t;
	}

	inline void check_trace(CampaignSummary& sum, const PhaseRecord& ph, unsigned m)
	{
		sum.malformed += !verify_trace_wellformed(ph.trace, ph.jobs, ph.priorities, m).empty();
	}

	// Fuzzes MCRs on one transition that satisfies the sufficient condition.
	// Trial 0 is the worst case (every task of C(i,j) releases a full-WCET job
	// at the MCR); the others place the MCR at random inside a random sporadic
	// run of the old mode. Each trial checks rem-job deadlines, enablement
	// deadlines, the delay bound, and completion dominance over the same run
	// without the MCR.
	inline CampaignSummary verify_condition_sufficiency(const MultiModeSystem& sys,
	                                                    std::string_view from, std::string_view to,
	                                                    const FuzzConfig& cfg)
	{
		check_config(cfg);
		const auto report = check_transition_condition(sys, from, to);
		if (!report.satisfied)
			throw Error("condition not satisfied; sufficiency test inapplicable ("
			            + std::string(from) + " -> " + std::string(to) + ")");
		const auto& old_mode = sys.mode(from);
		const auto& new_mode = sys.mode(to);
		const auto old_idx = *sys.find_mode(from);
		const unsigned m = sys.processors;

		CampaignSummary sum;
		sum.name = "sufficiency " + std::string(from) + "->" + std::string(to);

		auto check_transition = [&](const TransitionTrace& tt, std::size_t t, std::uint64_t seed) {
			sum.checks += tt.enablement.size() + tt.remjob_deadlines.jobs.size();
			sum.malformed += !verify_trace_wellformed(tt.rem_schedule, tt.scheduled_jobs, tt.priorities, m)
			                      .empty();
			const auto at = "t_mcr=" + std::to_string(tt.t_mcr) + ": ";
			if (!tt.enablement_met())
				sum.fail(t, seed, at + "enablement deadline missed (t_enable=" + std::to_string(tt.t_enable) + ")");
			if (!tt.remjob_deadlines.all_met)
				sum.fail(t, seed, at + "rem-job deadline missed");
			std::vector<Time> work;
			for (const auto& j : tt.rem_jobs)
				work.push_back(j.exec_req);
			if (Rational(tt.delay()) > upms(work, m))
				sum.fail(t, seed, at + "transition delay exceeds upms of the remaining work");
			if (Rational(tt.delay()) > report.upms_value)
				sum.fail(t, seed, at + "transition delay exceeds the worst-case upms");
		};

		for (std::size_t t = 0; t < cfg.trials; ++t) {
			const auto seed = trial_seed(cfg.seed, t);
			++sum.trials;
			if (t == 0) {
				const auto jobs = build_worst_case_remjobs(sys, from, to);
				check_transition(run_transition(sys, from, to, jobs, 0), t, seed);
				continue;
			}
			Rng rng(seed);
			const Time horizon = 4 * max_period(old_mode) + cfg.max_offset;
			const auto sc = random_scenario(old_mode, horizon, cfg, rng);
			const Time t_mcr = rng.uniform(0, horizon);
			const std::map<std::string, ArrivalScenario> scenarios{
			    {old_mode.name, sc}, {new_mode.name, periodic_scenario(new_mode, max_period(new_mode))}};
			const std::vector<MCREvent> mcrs{{t_mcr, new_mode.name}};
			const auto run = run_multimode(sys, from, scenarios, mcrs);
			for (const auto& ph : run.phases)
				check_trace(sum, ph, m);
			const auto& tt = run.transitions.front();
			check_transition(tt, t, seed);

			// same releases, no MCR
			const auto base_jobs = scenario_jobs(sys, old_idx, sc, 0);
			const auto base_prio = assign_priorities(old_mode.policy, base_jobs);
			const auto base = simulate(base_jobs, base_prio, m);
			sum.malformed += !verify_trace_wellformed(base, base_jobs, base_prio, m).empty();
			if (!check_trace_deadlines(base, base_jobs).all_met)
				sum.fail(t, seed, "old mode misses a deadline without any MCR (steady-state premise)");
			for (const auto& j : tt.rem_jobs) {
				++sum.checks;
				if (tt.rem_schedule.completions.at(j.id) > base.completions.at(j.id))
					sum.fail(t, seed, j.id + " completes later with the MCR than without");
			}
		}
		return sum;
	}

	// Global EDF density test for constrained deadlines:
	// sum(C/D) <= m - (m - 1) * max(C/D).
	inline bool edf_density_test(const Mode& mode, unsigned m)
	{
		Rational total(0), peak(0);
		for (const auto& t : mode.tasks) {
			const Rational d(t.wcet, t.deadline);
			total += d;
			peak = std::max(peak, d);
		}
		return total <= Rational(static_cast<Time>(m)) - Rational(static_cast<Time>(m) - 1) * peak;
	}

	// Steady-state schedulable by construction: modes with at most m tasks
	// never queue a job (any policy), larger modes use EDF and pass the
	// density test.
	inline bool known_schedulable(const Mode& mode, unsigned m)
	{
		return mode.tasks.size() <= m || (mode.policy == Policy::EDF && edf_density_test(mode, m));
	}

	// Random system whose every ordered mode pair has a transition satisfying
	// the sufficient condition, with one enablement deadline pinned to
	// ceil(upms).
	inline MultiModeSystem random_system(Rng& rng)
	{
		MultiModeSystem sys;
		sys.processors = static_cast<unsigned>(rng.uniform(2, 4));
		const auto m = sys.processors;
		const auto n_modes = rng.uniform(2, 3);
		for (Time k = 0; k < n_modes; ++k) {
			Mode mode;
			mode.name = "M" + std::to_string(k + 1);
			do {
				mode.tasks.clear();
				const auto n = rng.uniform(1, 2 * static_cast<Time>(m) + 1);
				mode.policy = static_cast<std::size_t>(n) <= m
				                  ? static_cast<Policy>(rng.uniform(0, 2))
				                  : Policy::EDF;
				for (Time i = 0; i < n; ++i) {
					TaskSpec t;
					t.name = "t" + std::to_string(i + 1);
					t.min_interarrival = rng.uniform(8, 40);
					t.deadline = rng.uniform(t.min_interarrival / 2, t.min_interarrival);
					t.wcet = rng.uniform(1, std::max<Time>(1, t.deadline / 3));
					mode.tasks.push_back(std::move(t));
				}
			} while (!known_schedulable(mode, m));
			sys.modes.push_back(std::move(mode));
		}
		for (const auto& a : sys.modes)
			for (const auto& b : sys.modes) {
				if (a.name == b.name)
					continue;
				TransitionSpec spec;
				spec.from_mode = a.name;
				spec.to_mode = b.name;
				std::vector<Time> wcets;
				for (const auto& t : a.tasks)
					if (rng.chance(0.7)) {
						spec.complete_set.push_back(t.name);
						wcets.push_back(t.wcet);
					}
				const auto bound = upms(wcets, m);
				const Time base = (bound.numerator() + bound.denominator() - 1) / bound.denominator();
				const auto tight = static_cast<std::size_t>(rng.uniform(0, static_cast<Time>(b.tasks.size()) - 1));
				for (std::size_t i = 0; i < b.tasks.size(); ++i)
					spec.enablement_deadlines.push_back(
					    {b.tasks[i].name, i == tight ? base : base + rng.uniform(0, 10)});
				sys.transitions.push_back(std::move(spec));
			}
		return sys;
	}

	// m = 2; A -> B: C(A,B) has three WCET-4 jobs, upms = 8 = min enablement
	// deadline. B -> A: one WCET-2 job against a deadline of 2.
	inline MultiModeSystem boundary_system()
	{
		MultiModeSystem sys;
		sys.processors = 2;
		sys.modes.push_back({"A", {{"a", 4, 12, 12}, {"b", 4, 12, 12}, {"c", 4, 12, 12}}, Policy::EDF});
		sys.modes.push_back({"B", {{"x", 2, 10, 10}, {"y", 3, 10, 10}, {"z", 3, 10, 10}}, Policy::EDF});
		sys.transitions.push_back({"A", "B", {"a", "b", "c"}, {{"x", 8}, {"y", 10}, {"z", 9}}});
		sys.transitions.push_back({"B", "A", {"x"}, {{"a", 2}, {"b", 2}, {"c", 2}}});
		return sys;
	}

	// Every transition of the system, `cfg.trials` scenarios each.
	inline std::vector<CampaignSummary> verify_system_sufficiency(const MultiModeSystem& sys,
	                                                              const FuzzConfig& cfg)
	{
		std::vector<CampaignSummary> out;
		for (std::size_t i = 0; i < sys.transitions.size(); ++i) {
			auto c = cfg;
			c.seed = trial_seed(cfg.seed, 1000 + i);
			out.push_back(verify_condition_sufficiency(sys, sys.transitions[i].from_mode,
			                                           sys.transitions[i].to_mode, c));
		}
		return out;
	}

	// The boundary system followed by random systems, all satisfying the
	// sufficient condition on every transition.
	inline std::vector<MultiModeSystem> sufficiency_suite(std::uint64_t seed, std::size_t count)
	{
		std::vector<MultiModeSystem> out;
		if (count == 0)
			return out;
		out.push_back(boundary_system());
		for (std::size_t i = 1; i < count; ++i) {
			Rng rng(trial_seed(seed, i));
			out.push_back(random_system(rng));
		}
		return out;
	}

} // namespace mmrt

#endif
