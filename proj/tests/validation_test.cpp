#include <gtest/gtest.h>

#include "mmrt/validation.hpp"
#include "oracle.hpp"

using namespace mmrt;

TEST(BruteForce, EqualJobsAttainBound)
{
	const std::vector<Time> ps{3, 3, 3};
	const auto r = brute_force_max_makespan(ps, 2);
	EXPECT_EQ(r.max_makespan, 6);
	EXPECT_EQ(r.bound, Rational(6));
	EXPECT_TRUE(r.holds);
	EXPECT_TRUE(r.exhaustive);
	EXPECT_EQ(r.orders, 6u);
	EXPECT_EQ(r.malformed, 0u);
}

TEST(BruteForce, LongestJobLastIsWorst)
{
	const std::vector<Time> ps{2, 3, 4};
	const auto r = brute_force_max_makespan(ps, 2);
	EXPECT_EQ(r.max_makespan, 6);
	EXPECT_EQ(r.bound, Rational(13, 2));
	EXPECT_TRUE(r.holds);
	EXPECT_EQ(r.witness_order.rank(2), 2u); // p=4 has the lowest priority
	EXPECT_EQ(oracle::max_makespan({2, 3, 4}, 2), 6);
}

TEST(BruteForce, SingleJob)
{
	const std::vector<Time> ps{5};
	const auto r = brute_force_max_makespan(ps, 2);
	EXPECT_EQ(r.max_makespan, 5);
	EXPECT_EQ(r.bound, Rational(5));
	EXPECT_TRUE(r.holds);
}

TEST(BruteForce, CapExceeded)
{
	const std::vector<Time> ps(9, 1);
	try {
		brute_force_max_makespan(ps, 2);
		FAIL();
	} catch (const Error& e) {
		EXPECT_NE(std::string(e.what()).find("exhaustive cap exceeded"), std::string::npos);
	}
	Rng rng(1);
	const auto r = sampled_max_makespan(ps, 2, 50, rng);
	EXPECT_FALSE(r.exhaustive);
	EXPECT_EQ(r.orders, 50u);
	EXPECT_TRUE(r.holds);
}

TEST(BruteForce, AgreesWithTickOracle)
{
	std::mt19937_64 gen(8);
	for (int trial = 0; trial < 30; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(2, 4));
		std::vector<Time> ps(static_cast<std::size_t>(rng.uniform(1, 5)));
		for (auto& p : ps)
			p = rng.uniform(1, 9);
		EXPECT_EQ(brute_force_max_makespan(ps, m).max_makespan, oracle::max_makespan(ps, m));
	}
}

TEST(BoundFuzz, NoFailures)
{
	FuzzConfig cfg;
	cfg.seed = 3;
	cfg.trials = 40;
	cfg.n_range = {1, 6};
	const auto s = verify_bound_fuzz(cfg);
	EXPECT_EQ(s.trials, 40u);
	EXPECT_EQ(s.failures, 0u);
	EXPECT_EQ(s.malformed, 0u);
}

TEST(BoundFuzz, RepeatableWithSameSeed)
{
	FuzzConfig cfg;
	cfg.seed = 77;
	cfg.trials = 1;
	const auto a = verify_bound_fuzz(cfg);
	const auto b = verify_bound_fuzz(cfg);
	EXPECT_EQ(a.checks, b.checks);
	EXPECT_EQ(a.failures, b.failures);
}

TEST(BoundFuzz, UnitJobsOnePerProcessor)
{
	FuzzConfig cfg;
	cfg.trials = 10;
	cfg.n_range = {3, 3};
	cfg.m_range = {3, 3};
	cfg.p_range = {1, 1};
	const auto s = verify_bound_fuzz(cfg);
	EXPECT_EQ(s.failures, 0u);
	const std::vector<Time> ps{1, 1, 1};
	const auto r = brute_force_max_makespan(ps, 3);
	EXPECT_EQ(r.max_makespan, 1);
	EXPECT_EQ(r.bound, Rational(1));
}

TEST(BoundFuzz, RejectsBadConfig)
{
	FuzzConfig cfg;
	cfg.trials = 0;
	EXPECT_THROW(verify_bound_fuzz(cfg), Error);
	cfg.trials = 1;
	cfg.p_range = {5, 1};
	EXPECT_THROW(verify_bound_fuzz(cfg), Error);
}

TEST(Predictability, IdentityReductionGivesIdenticalTrace)
{
	std::vector<JobInstance> jobs = ready_jobs(std::vector<Time>{4, 2, 5, 1});
	jobs[2].arrival = 3;
	const PriorityAssignment prio({2, 0, 3, 1});
	EXPECT_EQ(simulate(jobs, prio, 2), simulate(jobs, prio, 2));
}

TEST(Predictability, ZeroingOneJob)
{
	std::mt19937_64 gen(12);
	for (int trial = 0; trial < 200; ++trial) {
		Rng rng(gen());
		const auto n = static_cast<std::size_t>(rng.uniform(2, 7));
		std::vector<Time> ps(n);
		for (auto& p : ps)
			p = rng.uniform(1, 10);
		auto jobs = ready_jobs(ps);
		for (auto& j : jobs)
			j.arrival = rng.uniform(0, 10);
		std::vector<std::size_t> order(n);
		std::iota(order.begin(), order.end(), 0);
		std::shuffle(order.begin(), order.end(), rng.engine());
		const PriorityAssignment prio(order);
		const auto m = static_cast<unsigned>(rng.uniform(1, 3));

		auto reduced = jobs;
		const auto z = static_cast<std::size_t>(rng.uniform(0, static_cast<Time>(n) - 1));
		reduced[z].exec_req = 0;
		const auto a = simulate(jobs, prio, m);
		const auto b = simulate(reduced, prio, m);
		EXPECT_EQ(b.completions.at(jobs[z].id), jobs[z].arrival);
		for (const auto& j : jobs)
			EXPECT_LE(b.completions.at(j.id), a.completions.at(j.id));
	}
}

TEST(Predictability, CampaignNoFailures)
{
	FuzzConfig cfg;
	cfg.seed = 5;
	cfg.trials = 200;
	const auto s = verify_predictability(cfg);
	EXPECT_EQ(s.failures, 0u);
	EXPECT_EQ(s.malformed, 0u);
	EXPECT_EQ(s.trials, 200u);
}

TEST(Sufficiency, BoundarySystemEnabledExactlyAtDeadline)
{
	const auto sys = boundary_system();
	const auto jobs = build_worst_case_remjobs(sys, "A", "B");
	const auto tt = run_transition(sys, "A", "B", jobs, 0);
	EXPECT_EQ(tt.t_enable, 8);
	EXPECT_EQ(tt.enablement[0].deadline, 8);
	EXPECT_TRUE(tt.enablement_met());
}

TEST(Sufficiency, ZeroWorkRemJobs)
{
	const auto sys = boundary_system();
	auto jobs = build_worst_case_remjobs(sys, "A", "B");
	for (auto& j : jobs)
		j.exec_req = 0;
	const auto tt = run_transition(sys, "A", "B", jobs, 5);
	EXPECT_EQ(tt.t_enable, 5);
	EXPECT_TRUE(tt.enablement_met());
}

TEST(Sufficiency, FuzzedScenariosOnSatisfiedTransition)
{
	FuzzConfig cfg;
	cfg.seed = 9;
	cfg.trials = 100;
	const auto s = verify_condition_sufficiency(boundary_system(), "A", "B", cfg);
	EXPECT_EQ(s.trials, 100u);
	EXPECT_EQ(s.failures, 0u);
	EXPECT_EQ(s.malformed, 0u);
}

TEST(Sufficiency, RefusesUnsatisfiedTransition)
{
	auto sys = boundary_system();
	sys.transitions[0].enablement_deadlines[0].deadline = 7;
	try {
		verify_condition_sufficiency(sys, "A", "B", FuzzConfig{});
		FAIL();
	} catch (const Error& e) {
		EXPECT_NE(std::string(e.what()).find("condition not satisfied; sufficiency test inapplicable"),
		          std::string::npos);
	}
}

TEST(Generators, RandomSystemsAreValidAndSatisfied)
{
	for (std::uint64_t s = 0; s < 100; ++s) {
		Rng rng(trial_seed(42, s));
		const auto sys = random_system(rng);
		EXPECT_TRUE(validate_system(sys).empty());
		EXPECT_TRUE(all_satisfied(check_system(sys)));
		for (const auto& mode : sys.modes)
			EXPECT_TRUE(known_schedulable(mode, sys.processors));
	}
}

TEST(Generators, SuiteStartsWithBoundarySystem)
{
	const auto suite = sufficiency_suite(1, 3);
	ASSERT_EQ(suite.size(), 3u);
	const auto r = check_transition_condition(suite[0], "A", "B");
	EXPECT_EQ(r.upms_value, Rational(r.min_enable_deadline));
}

TEST(Generators, TrialSeedsDiffer)
{
	EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
	EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
	EXPECT_EQ(trial_seed(5, 3), trial_seed(5, 3));
}

TEST(EdfDensity, KnownCases)
{
	Mode light{"L", {{"a", 1, 4, 4}, {"b", 1, 4, 4}, {"c", 1, 4, 4}}, Policy::EDF};
	EXPECT_TRUE(edf_density_test(light, 2));
	Mode heavy{"H", {{"a", 3, 4, 4}, {"b", 3, 4, 4}, {"c", 3, 4, 4}}, Policy::EDF};
	EXPECT_FALSE(edf_density_test(heavy, 2));
}
