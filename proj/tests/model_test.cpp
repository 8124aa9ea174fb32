#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "mmrt/model.hpp"
#include "mmrt/validation.hpp"

using namespace mmrt;

namespace {

	MultiModeSystem two_modes()
	{
		MultiModeSystem sys;
		sys.processors = 2;
		sys.modes.push_back({"Mi", {{"A", 4, 10, 12}, {"B", 2, 6, 6}, {"X", 1, 5, 5}}, Policy::EDF});
		sys.modes.push_back({"Mj", {{"P", 3, 9, 9}, {"Q", 2, 8, 10}}, Policy::DM});
		sys.transitions.push_back({"Mi", "Mj", {"A", "B"}, {{"P", 8}, {"Q", 10}}});
		sys.transitions.push_back({"Mj", "Mi", {}, {{"A", 0}, {"B", 3}, {"X", 1}}});
		return sys;
	}

	bool has_rule(const std::vector<Violation>& v, const std::string& rule)
	{
		return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.rule == rule; });
	}

} // namespace

TEST(ValidateSystem, WellFormedSystemHasNoViolations)
{
	EXPECT_TRUE(validate_system(two_modes()).empty());
	EXPECT_TRUE(validate_system(boundary_system()).empty());
}

TEST(ValidateSystem, DeadlineAbovePeriod)
{
	auto sys = two_modes();
	sys.modes[0].tasks[0].deadline = 10;
	sys.modes[0].tasks[0].min_interarrival = 8;
	const auto v = validate_system(sys);
	ASSERT_EQ(v.size(), 1u);
	EXPECT_EQ(v[0].rule, "D <= T");
	EXPECT_EQ(v[0].path, "/modes/0/tasks/0/deadline");
}

TEST(ValidateSystem, CompleteSetOutsideOldMode)
{
	auto sys = two_modes();
	sys.transitions[0].complete_set.push_back("ghost");
	const auto v = validate_system(sys);
	ASSERT_EQ(v.size(), 1u);
	EXPECT_EQ(v[0].rule, "C(i,j) subset of old mode");
	EXPECT_EQ(v[0].path, "/transitions/0/complete/2");
}

TEST(ValidateSystem, TaskAndModeRules)
{
	auto sys = two_modes();
	sys.modes[0].tasks[1].wcet = 0;
	sys.modes[0].tasks[2].deadline = 0; // below wcet 1
	sys.modes[1].tasks[1].name = "P";
	sys.modes.push_back({"Mi", {}, Policy::FIFO});
	const auto v = validate_system(sys);
	EXPECT_TRUE(has_rule(v, "C >= 1"));
	EXPECT_TRUE(has_rule(v, "D >= C"));
	EXPECT_TRUE(has_rule(v, "unique task names"));
	EXPECT_TRUE(has_rule(v, "unique mode names"));
	EXPECT_TRUE(has_rule(v, "tasks non-empty"));
}

TEST(ValidateSystem, TransitionRules)
{
	auto sys = two_modes();
	sys.transitions.push_back({"Mi", "Mi", {}, {{"A", 1}, {"B", 1}, {"X", 1}}});
	sys.transitions.push_back({"Mi", "Mj", {}, {{"P", 1}, {"Q", 1}}});
	sys.transitions.push_back({"Mj", "Nowhere", {}, {}});
	sys.transitions[0].enablement_deadlines.pop_back();
	sys.transitions[1].enablement_deadlines[0].deadline = -1;
	const auto v = validate_system(sys);
	EXPECT_TRUE(has_rule(v, "no self-transition"));
	EXPECT_TRUE(has_rule(v, "one spec per pair"));
	EXPECT_TRUE(has_rule(v, "known mode"));
	EXPECT_TRUE(has_rule(v, "deadline per new-mode task"));
	EXPECT_TRUE(has_rule(v, "enablement deadline >= 0"));
}

TEST(ValidateSystem, IsPure)
{
	auto sys = two_modes();
	sys.modes[1].tasks[0].wcet = 20;
	sys.transitions[0].complete_set.push_back("nope");
	EXPECT_EQ(validate_system(sys), validate_system(sys));
	EXPECT_EQ(validate_system(sys).size(), 2u);
}

TEST(WorstCaseRemJobs, OneFullJobPerCompletingTaskAtMcr)
{
	const auto jobs = build_worst_case_remjobs(two_modes(), "Mi", "Mj");
	ASSERT_EQ(jobs.size(), 2u);
	EXPECT_EQ(jobs[0].task, "A");
	EXPECT_EQ(jobs[0].arrival, 0);
	EXPECT_EQ(jobs[0].exec_req, 4);
	EXPECT_EQ(jobs[0].abs_deadline, 10);
	EXPECT_EQ(jobs[1].task, "B");
	EXPECT_EQ(jobs[1].arrival, 0);
	EXPECT_EQ(jobs[1].exec_req, 2);
	EXPECT_EQ(jobs[1].abs_deadline, 6);
}

TEST(WorstCaseRemJobs, EmptyAndSingleton)
{
	auto sys = two_modes();
	EXPECT_TRUE(build_worst_case_remjobs(sys, "Mj", "Mi").empty());

	sys.modes[0].tasks[0] = {"A", 5, 5, 5};
	sys.transitions[0].complete_set = {"A"};
	const auto jobs = build_worst_case_remjobs(sys, "Mi", "Mj");
	ASSERT_EQ(jobs.size(), 1u);
	EXPECT_EQ(jobs[0].arrival, 0);
	EXPECT_EQ(jobs[0].exec_req, 5);
	EXPECT_EQ(jobs[0].abs_deadline, 5);
}

TEST(WorstCaseRemJobs, UnknownPair)
{
	EXPECT_THROW(build_worst_case_remjobs(two_modes(), "Mi", "Zz"), Error);
	try {
		build_worst_case_remjobs(two_modes(), "Mj", "Mj");
		FAIL();
	} catch (const Error& e) {
		EXPECT_NE(std::string(e.what()).find("no such transition"), std::string::npos);
	}
}

TEST(WorstCaseRemJobs, SizeAndTotalMatchCompleteSet)
{
	std::mt19937_64 gen(7);
	for (int trial = 0; trial < 50; ++trial) {
		Rng rng(gen());
		const auto sys = random_system(rng);
		for (const auto& tr : sys.transitions) {
			const auto jobs = build_worst_case_remjobs(sys, tr.from_mode, tr.to_mode);
			EXPECT_EQ(jobs.size(), tr.complete_set.size());
			Time want = 0;
			for (const auto& name : tr.complete_set)
				want += sys.mode(tr.from_mode).tasks[*sys.mode(tr.from_mode).find_task(name)].wcet;
			const Time got = std::accumulate(jobs.begin(), jobs.end(), Time{0},
			                                 [](Time s, const auto& j) { return s + j.exec_req; });
			EXPECT_EQ(got, want);
		}
	}
}

TEST(PeriodicScenario, ArithmeticProgression)
{
	Mode one{"M", {{"T5", 1, 5, 5}}, Policy::EDF};
	const auto sc = periodic_scenario(one, 12);
	ASSERT_EQ(sc.releases.size(), 1u);
	EXPECT_EQ(sc.releases[0], (std::vector<Release>{{0, 1}, {5, 1}, {10, 1}}));

	EXPECT_TRUE(periodic_scenario(one, 0).releases[0].empty());

	Mode two{"M", {{"a", 1, 3, 3}, {"b", 2, 4, 4}}, Policy::EDF};
	const auto sc2 = periodic_scenario(two, 8);
	EXPECT_EQ(sc2.releases[0], (std::vector<Release>{{0, 1}, {3, 1}, {6, 1}}));
	EXPECT_EQ(sc2.releases[1], (std::vector<Release>{{0, 2}, {4, 2}}));
}

TEST(Scenario, SeparationAndWcetChecks)
{
	Mode mode{"M", {{"a", 2, 5, 5}}, Policy::EDF};
	ArrivalScenario sc{{{{0, 2}, {4, 1}}}, 10};
	auto v = validate_scenario(mode, sc);
	ASSERT_EQ(v.size(), 1u);
	EXPECT_EQ(v[0].rule, "min inter-arrival");

	sc.releases[0] = {{0, 3}};
	v = validate_scenario(mode, sc);
	ASSERT_EQ(v.size(), 1u);
	EXPECT_EQ(v[0].rule, "0 <= exec_req <= wcet");
}

TEST(Scenario, GeneratedScenariosRespectSeparation)
{
	std::mt19937_64 gen(11);
	FuzzConfig cfg;
	for (int trial = 0; trial < 100; ++trial) {
		Rng rng(gen());
		const auto sys = random_system(rng);
		for (const auto& mode : sys.modes) {
			EXPECT_TRUE(validate_scenario(mode, random_scenario(mode, 200, cfg, rng)).empty());
			EXPECT_TRUE(validate_scenario(mode, periodic_scenario(mode, 200)).empty());
		}
	}
}

TEST(Scenario, JobsAreShiftedAndCut)
{
	auto sys = two_modes();
	const auto sc = periodic_scenario(sys.modes[1], 30);
	const auto jobs = scenario_jobs(sys, 1, sc, 100, 118);
	// P at 100, 109, 118; Q at 100, 110
	ASSERT_EQ(jobs.size(), 5u);
	EXPECT_EQ(jobs[0].id, "Mj.P.1");
	EXPECT_EQ(jobs[2].arrival, 118);
	EXPECT_EQ(jobs[2].abs_deadline, 127);
	EXPECT_EQ(jobs[4].key, (JobKey{1, 1, 2}));
}
