#include <gtest/gtest.h>

#include <random>

#include "mmrt/analysis.hpp"
#include "mmrt/validation.hpp"
#include "oracle.hpp"

using namespace mmrt;

namespace {

	Rational bound(std::vector<Time> ps, unsigned m) { return upms(JobSetSummary(std::move(ps)), m); }

	MultiModeSystem condition_system(std::vector<Time> wcets, std::vector<Time> deadlines)
	{
		MultiModeSystem sys;
		sys.processors = 2;
		Mode from{"I", {}, Policy::EDF};
		for (std::size_t i = 0; i < wcets.size(); ++i)
			from.tasks.push_back({"c" + std::to_string(i), wcets[i], 20, 20});
		if (from.tasks.empty())
			from.tasks.push_back({"idle", 1, 20, 20});
		Mode to{"J", {}, Policy::EDF};
		TransitionSpec spec{"I", "J", {}, {}};
		for (std::size_t i = 0; i < deadlines.size(); ++i) {
			to.tasks.push_back({"n" + std::to_string(i), 1, 10, 10});
			spec.enablement_deadlines.push_back({to.tasks.back().name, deadlines[i]});
		}
		for (std::size_t i = 0; i < wcets.size(); ++i)
			spec.complete_set.push_back(from.tasks[i].name);
		sys.modes = {from, to};
		sys.transitions = {spec};
		return sys;
	}

} // namespace

TEST(JobSetSummary, Fields)
{
	const JobSetSummary js({3, 7, 2});
	EXPECT_EQ(js.n, 3u);
	EXPECT_EQ(js.p_max, 7);
	EXPECT_EQ(js.total, 12);
	const JobSetSummary empty;
	EXPECT_EQ(empty.p_max, 0);
	EXPECT_EQ(empty.total, 0);
}

TEST(Upms, MoreProcessorsThanJobs) { EXPECT_EQ(bound({3, 5}, 4), Rational(5)); }

TEST(Upms, GeneralCase) { EXPECT_EQ(bound({4, 4, 4}, 2), Rational(8)); }

TEST(Upms, AttainedInstance)
{
	EXPECT_EQ(bound({3, 3, 3}, 2), Rational(6));
	EXPECT_EQ(oracle::max_makespan({3, 3, 3}, 2), 6);
}

TEST(Upms, FractionalValue) { EXPECT_EQ(bound({2, 3, 4}, 2), Rational(13, 2)); }

TEST(Upms, EmptyJobSet)
{
	for (unsigned m = 1; m <= 5; ++m)
		EXPECT_EQ(bound({}, m), Rational(0));
}

TEST(Upms, SingleProcessorIsTotalWork) { EXPECT_EQ(bound({2, 3, 4}, 1), Rational(9)); }

TEST(Upms, RejectsZeroProcessors) { EXPECT_THROW(bound({1}, 0), Error); }

TEST(Upms, MonotoneInJobs)
{
	std::mt19937_64 gen(1);
	for (int trial = 0; trial < 1000; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(1, 6));
		std::vector<Time> ps(static_cast<std::size_t>(rng.uniform(0, 10)));
		for (auto& p : ps)
			p = rng.uniform(0, 30);
		auto more = ps;
		more.push_back(rng.uniform(0, 30));
		EXPECT_GE(bound(more, m), bound(ps, m));
	}
}

TEST(Upms, MonotoneInProcessingTime)
{
	std::mt19937_64 gen(2);
	for (int trial = 0; trial < 1000; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(1, 6));
		std::vector<Time> ps(static_cast<std::size_t>(rng.uniform(1, 10)));
		for (auto& p : ps)
			p = rng.uniform(0, 30);
		auto bigger = ps;
		const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<Time>(ps.size()) - 1));
		bigger[i] += rng.uniform(0, 15);
		EXPECT_GE(bound(bigger, m), bound(ps, m));
	}
}

TEST(Upms, ScaleHomogeneous)
{
	std::mt19937_64 gen(3);
	for (int trial = 0; trial < 300; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(1, 6));
		const auto c = rng.uniform(1, 9);
		std::vector<Time> ps(static_cast<std::size_t>(rng.uniform(0, 9)));
		for (auto& p : ps)
			p = rng.uniform(1, 20);
		auto scaled = ps;
		for (auto& p : scaled)
			p *= c;
		EXPECT_EQ(bound(scaled, m), Rational(c) * bound(ps, m));
	}
}

TEST(Upms, MBranchNeverLooserAtNEqualsM)
{
	std::mt19937_64 gen(4);
	for (int trial = 0; trial < 300; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(2, 6));
		std::vector<Time> ps(m);
		for (auto& p : ps)
			p = rng.uniform(1, 20);
		const JobSetSummary js(ps);
		const Rational general = Rational(js.total, m) + (Rational(1) - Rational(1, m)) * Rational(js.p_max);
		EXPECT_LE(upms(js, m), general);
	}
}

TEST(Upms, SoundAgainstTickOracle)
{
	// exhaustive over priority orders with an independent simulator
	std::mt19937_64 gen(5);
	for (int trial = 0; trial < 40; ++trial) {
		Rng rng(gen());
		const auto m = static_cast<unsigned>(rng.uniform(2, 4));
		std::vector<Time> ps(static_cast<std::size_t>(rng.uniform(1, 5)));
		for (auto& p : ps)
			p = rng.uniform(1, 8);
		EXPECT_LE(Rational(oracle::max_makespan(ps, m)), bound(ps, m));
	}
}

TEST(MinEnablementDeadline, Minimum)
{
	TransitionSpec s{"I", "J", {}, {{"a", 8}, {"b", 10}, {"c", 9}}};
	EXPECT_EQ(min_enablement_deadline(s), 8);
	s.enablement_deadlines = {{"a", 5}};
	EXPECT_EQ(min_enablement_deadline(s), 5);
	s.enablement_deadlines = {{"a", 7}, {"b", 7}};
	EXPECT_EQ(min_enablement_deadline(s), 7);
	s.enablement_deadlines.clear();
	EXPECT_THROW(min_enablement_deadline(s), Error);
}

TEST(CheckTransition, BoundaryIsSatisfied)
{
	const auto r = check_transition_condition(condition_system({4, 4, 4}, {8, 10, 9}), "I", "J");
	EXPECT_EQ(r.upms_value, Rational(8));
	EXPECT_EQ(r.min_enable_deadline, 8);
	EXPECT_TRUE(r.satisfied);
	EXPECT_EQ(r.worst_case_jobset.n, 3u);
}

TEST(CheckTransition, OneTickShortFails)
{
	const auto r = check_transition_condition(condition_system({4, 4, 4}, {7, 10, 9}), "I", "J");
	EXPECT_EQ(r.upms_value, Rational(8));
	EXPECT_FALSE(r.satisfied);
}

TEST(CheckTransition, NoRemJobs)
{
	const auto r = check_transition_condition(condition_system({}, {0, 3}), "I", "J");
	EXPECT_EQ(r.upms_value, Rational(0));
	EXPECT_TRUE(r.satisfied);
}

TEST(CheckTransition, FractionalBoundComparedExactly)
{
	// upms({2,3,4}, 2) = 13/2: deadline 6 fails, 7 passes
	EXPECT_FALSE(check_transition_condition(condition_system({2, 3, 4}, {6}), "I", "J").satisfied);
	EXPECT_TRUE(check_transition_condition(condition_system({2, 3, 4}, {7}), "I", "J").satisfied);
}

TEST(CheckTransition, UnknownTransition)
{
	EXPECT_THROW(check_transition_condition(condition_system({1}, {1}), "J", "I"), Error);
}

TEST(CheckSystem, BothDirectionsSatisfied)
{
	const auto reports = check_system(boundary_system());
	ASSERT_EQ(reports.size(), 2u);
	EXPECT_TRUE(all_satisfied(reports));
}

TEST(CheckSystem, OneFailingPair)
{
	auto sys = boundary_system();
	sys.transitions[0].enablement_deadlines[0].deadline = 7;
	const auto reports = check_system(sys);
	EXPECT_FALSE(reports[0].satisfied);
	EXPECT_TRUE(reports[1].satisfied);
	EXPECT_FALSE(all_satisfied(reports));
}

TEST(CheckSystem, ThreeModesSixSpecs)
{
	MultiModeSystem sys;
	sys.processors = 3;
	for (auto name : {"A", "B", "C"})
		sys.modes.push_back({name, {{"t", 1, 4, 4}}, Policy::EDF});
	for (auto a : {"A", "B", "C"})
		for (auto b : {"A", "B", "C"})
			if (std::string(a) != b)
				sys.transitions.push_back({a, b, {"t"}, {{"t", 1}}});
	EXPECT_EQ(check_system(sys).size(), 6u);
}

TEST(CheckSystem, InvalidSystemListsViolations)
{
	auto sys = boundary_system();
	sys.modes[0].tasks[0].deadline = 20;
	try {
		check_system(sys);
		FAIL();
	} catch (const InvalidSystem& e) {
		ASSERT_EQ(e.violations.size(), 1u);
		EXPECT_EQ(e.violations[0].rule, "D <= T");
	}
}
