// mmrt: analysis, simulation and validation front end for multi-mode
// real-time systems on identical multiprocessors.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmrt/analysis.hpp"
#include "mmrt/engine.hpp"
#include "mmrt/io.hpp"
#include "mmrt/model.hpp"
#include "mmrt/protocol.hpp"
#include "mmrt/validation.hpp"

namespace {

	using namespace mmrt;
	using io::Json;

	enum Exit : int {
		ok = 0,
		unsatisfied = 1,
		parse_failure = 2,
		validation_failure = 3,
		invariant_breach = 4,
	};

	struct InvariantBreach : Error {
		using Error::Error;
	};

	void expect_wellformed(const ScheduleTrace& tr, std::span<const JobInstance> jobs,
	                       const PriorityAssignment& prio, unsigned m, const std::string& what)
	{
		auto v = verify_trace_wellformed(tr, jobs, prio, m);
		if (!v.empty())
			throw InvariantBreach(what + ": malformed schedule: " + v.front().path + " "
			                      + v.front().message + " [" + v.front().rule + "]");
	}

	void expect_transition_invariants(const TransitionTrace& tt, unsigned m)
	{
		expect_wellformed(tt.rem_schedule, tt.scheduled_jobs, tt.priorities, m, "transition");
		for (const auto& e : tt.enablement)
			if (e.enabled_at != tt.t_enable)
				throw InvariantBreach("new-mode tasks enabled at different instants");
		std::vector<Time> work;
		for (const auto& j : tt.rem_jobs)
			work.push_back(j.exec_req);
		if (Rational(tt.delay()) > upms(work, m))
			throw InvariantBreach("transition delay exceeds upms of the rem-jobs");
	}

	void write_trace_file(const std::string& path, const io::TraceDocument& doc)
	{
		std::ofstream out(path, std::ios::binary);
		if (!out)
			throw Error("cannot write " + path);
		io::write_trace(out, doc);
	}

	void print_deadlines(std::ostream& out, const DeadlineReport& r)
	{
		for (const auto& v : r.jobs) {
			out << "  " << std::left << std::setw(18) << v.job << " deadline " << std::setw(6) << v.deadline
			    << " completion ";
			if (v.completion)
				out << std::setw(6) << *v.completion;
			else
				out << std::setw(6) << "-";
			out << (v.met ? "met" : "MISSED") << '\n';
		}
		out << "  " << r.jobs.size() - r.misses() << "/" << r.jobs.size() << " job deadlines met\n";
	}

	int cmd_analyze(const std::string& path, bool json)
	{
		const auto sys = io::parse_system(path);
		const auto reports = check_system(sys);
		if (json) {
			std::cout << io::analysis_json(reports).dump(2) << '\n';
		} else {
			std::cout << "m = " << sys.processors << "\n";
			std::cout << std::left << std::setw(24) << "transition" << std::setw(10) << "|C(i,j)|"
			          << std::setw(12) << "upms" << std::setw(10) << "min D" << "verdict\n";
			for (const auto& r : reports)
				std::cout << std::left << std::setw(24) << (r.from + " -> " + r.to) << std::setw(10)
				          << r.worst_case_jobset.n << std::setw(12) << to_string(r.upms_value)
				          << std::setw(10) << r.min_enable_deadline
				          << (r.satisfied ? "satisfied" : "NOT satisfied") << '\n';
			std::cout << (all_satisfied(reports) ? "system: valid (every transition satisfies the condition)\n"
			                                     : "system: not shown valid\n");
		}
		return all_satisfied(reports) ? ok : unsatisfied;
	}

	struct TransitionArgs {
		std::string system, from, to, scenario, trace;
		bool worst_case = false, gantt = false, json = false;
	};

	int cmd_transition(const TransitionArgs& a)
	{
		const auto sys = io::parse_system(a.system);
		std::vector<JobInstance> remjobs;
		Time t_mcr = 0;
		if (!a.scenario.empty()) {
			auto sc = io::remjobs_from_json(io::parse_json_text(io::read_file(a.scenario)), sys, a.from);
			remjobs = std::move(sc.rem_jobs);
			t_mcr = sc.t_mcr;
		} else {
			remjobs = build_worst_case_remjobs(sys, a.from, a.to);
		}
		const auto tt = run_transition(sys, a.from, a.to, remjobs, t_mcr);
		expect_transition_invariants(tt, sys.processors);

		if (!a.trace.empty()) {
			io::TraceDocument doc;
			doc.meta = Json{{"command", "transition"},
			                {"from", tt.from},
			                {"to", tt.to},
			                {"scenario", a.scenario.empty() ? "worst-case" : "file"}};
			doc.phases.push_back({"transition", "", tt.from, tt.to, tt.t_mcr, tt.t_enable});
			doc.trace = tt.rem_schedule;
			write_trace_file(a.trace, doc);
		}

		const auto report = check_transition_condition(sys, a.from, a.to);
		if (a.json) {
			auto j = io::to_json(tt, sys.processors);
			j["condition"] = io::to_json(report);
			std::cout << j.dump(2) << '\n';
		} else {
			std::cout << "transition " << tt.from << " -> " << tt.to << " ("
			          << (a.scenario.empty() ? "worst case" : "scenario " + a.scenario) << ")\n";
			std::cout << "t_mcr    = " << tt.t_mcr << "\n";
			std::cout << "t_enable = " << tt.t_enable << "  (delay " << tt.delay() << ", upms bound "
			          << to_string(report.upms_value) << ")\n";
			std::cout << "rem-jobs: " << tt.rem_jobs.size() << '\n';
			print_deadlines(std::cout, tt.remjob_deadlines);
			std::cout << "enablement:\n";
			for (const auto& e : tt.enablement)
				std::cout << "  " << std::left << std::setw(18) << e.task << " enabled at " << std::setw(6)
				          << e.enabled_at << " deadline " << std::setw(6) << e.deadline
				          << (e.met ? "met" : "MISSED") << '\n';
			if (a.gantt)
				std::cout << io::render_gantt(tt.rem_schedule);
		}
		return tt.enablement_met() && tt.remjob_deadlines.all_met ? ok : unsatisfied;
	}

	struct SimulateArgs {
		std::string system, mode, scenario, trace;
		Time horizon = 0;
		bool gantt = false, json = false;
	};

	int cmd_simulate(const SimulateArgs& a)
	{
		const auto sys = io::parse_system(a.system);
		const auto idx = sys.find_mode(a.mode);
		if (!idx)
			throw io::ParseError(io::ParseError::Kind::Semantic, {"--mode: no such mode '" + a.mode + "'"});
		const auto& mode = sys.modes[*idx];
		const auto sc = a.scenario.empty()
		                    ? periodic_scenario(mode, a.horizon)
		                    : io::scenario_from_json(io::parse_json_text(io::read_file(a.scenario)), mode);
		const auto jobs = scenario_jobs(sys, *idx, sc, 0);
		const auto prio = assign_priorities(mode.policy, jobs);
		const auto trace = simulate(jobs, prio, sys.processors);
		expect_wellformed(trace, jobs, prio, sys.processors, "simulate");
		const auto rep = check_trace_deadlines(trace, jobs);

		if (!a.trace.empty()) {
			io::TraceDocument doc;
			doc.meta = Json{{"command", "simulate"}, {"mode", mode.name}, {"policy", to_string(mode.policy)}};
			doc.phases.push_back({"steady", mode.name, "", "", trace.start, trace.end});
			doc.trace = trace;
			write_trace_file(a.trace, doc);
		}
		if (a.json) {
			std::cout << Json{{"mode", mode.name},
			                  {"policy", to_string(mode.policy)},
			                  {"jobs", jobs.size()},
			                  {"makespan", trace.makespan() ? Json(*trace.makespan()) : Json(nullptr)},
			                  {"deadlines", io::to_json(rep)}}
			                 .dump(2)
			          << '\n';
		} else {
			std::cout << "mode " << mode.name << " (" << to_string(mode.policy) << ", m=" << sys.processors
			          << "), " << jobs.size() << " jobs\n";
			print_deadlines(std::cout, rep);
			if (a.gantt)
				std::cout << io::render_gantt(trace);
		}
		return rep.all_met ? ok : unsatisfied;
	}

	struct RunArgs {
		std::string system, script, trace;
		bool gantt = false, json = false;
	};

	int cmd_run(const RunArgs& a)
	{
		const auto sys = io::parse_system(a.system);
		const auto script = io::script_from_json(io::parse_json_text(io::read_file(a.script)), sys);
		const auto run = run_multimode(sys, script.initial_mode, script.scenarios, script.mcrs);
		for (const auto& ph : run.phases)
			expect_wellformed(ph.trace, ph.jobs, ph.priorities, sys.processors, "run");
		for (std::size_t i = 1; i < run.phases.size(); ++i)
			if (run.phases[i].start != run.phases[i - 1].end)
				throw InvariantBreach("phases are not contiguous");
		for (const auto& tt : run.transitions)
			expect_transition_invariants(tt, sys.processors);

		if (!a.trace.empty())
			write_trace_file(a.trace, io::trace_document(run, Json{{"command", "run"}, {"initial_mode", script.initial_mode}}));
		if (a.json) {
			std::cout << io::to_json(run).dump(2) << '\n';
		} else {
			for (const auto& ph : run.phases) {
				const auto s = io::phase_span(ph);
				std::cout << "[" << s.t0 << ", " << s.t1 << ") "
				          << (s.kind == "steady" ? "steady " + s.mode : "transition " + s.from + " -> " + s.to)
				          << '\n';
			}
			for (const auto& tt : run.transitions)
				std::cout << "MCR at " << tt.t_mcr << ": " << tt.rem_jobs.size() << " rem-jobs, "
				          << tt.aborted_jobs.size() << " aborted, new mode enabled at " << tt.t_enable
				          << (tt.enablement_met() ? " (enablement deadlines met)" : " (ENABLEMENT DEADLINE MISSED)")
				          << '\n';
			print_deadlines(std::cout, run.job_deadlines);
			if (a.gantt)
				std::cout << io::render_gantt(run.combined());
		}
		return run.all_met() ? ok : unsatisfied;
	}

	struct ValidateArgs {
		std::string campaign = "bound";
		std::string system, from, to;
		FuzzConfig cfg;
		std::size_t systems = 20;
		bool json = false;
	};

	int cmd_validate(const ValidateArgs& a)
	{
		std::vector<CampaignSummary> sums;
		if (a.campaign == "bound") {
			sums.push_back(verify_bound_fuzz(a.cfg));
		} else if (a.campaign == "predictability") {
			sums.push_back(verify_predictability(a.cfg));
		} else if (!a.system.empty()) {
			const auto sys = io::parse_system(a.system);
			if (a.from.empty() != a.to.empty())
				throw Error("--from and --to go together");
			if (a.from.empty())
				sums = verify_system_sufficiency(sys, a.cfg);
			else
				sums.push_back(verify_condition_sufficiency(sys, a.from, a.to, a.cfg));
		} else {
			const auto suite = sufficiency_suite(a.cfg.seed, a.systems);
			for (const auto& sys : suite)
				for (auto& s : verify_system_sufficiency(sys, a.cfg))
					sums.push_back(std::move(s));
		}

		std::size_t failures = 0, malformed = 0;
		for (const auto& s : sums) {
			failures += s.failures;
			malformed += s.malformed;
		}
		if (a.json) {
			Json arr = Json::array();
			for (const auto& s : sums)
				arr.push_back(io::to_json(s));
			std::cout << Json{{"campaign", a.campaign},
			                  {"seed", a.cfg.seed},
			                  {"failures", failures},
			                  {"malformed_traces", malformed},
			                  {"campaigns", std::move(arr)}}
			                 .dump(2)
			          << '\n';
		} else {
			for (const auto& s : sums) {
				std::cout << s.name << ": " << s.trials << " trials, " << s.checks << " checks, " << s.failures
				          << " failures, " << s.malformed << " malformed traces\n";
				for (const auto& f : s.failed)
					std::cout << "  trial " << f.trial << " (seed " << f.seed << "): " << f.what << '\n';
			}
			std::cout << failures + malformed << " failures\n";
		}
		return failures + malformed == 0 ? ok : validation_failure;
	}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Multi-mode real-time systems on identical multiprocessors: mode-change analysis and simulation"};
	app.require_subcommand(1);

	std::string analyze_path;
	bool analyze_json = false;
	auto* analyze = app.add_subcommand("analyze", "check the transition condition for every declared transition");
	analyze->add_option("system", analyze_path, "system document")->required();
	analyze->add_flag("--json", analyze_json, "machine-readable output");

	TransitionArgs ta;
	auto* transition = app.add_subcommand("transition", "run one mode transition under the synchronous protocol");
	transition->add_option("system", ta.system, "system document")->required();
	transition->add_option("--from", ta.from, "old mode")->required();
	transition->add_option("--to", ta.to, "new mode")->required();
	auto* wc = transition->add_flag("--worst-case", ta.worst_case, "every completing task releases a full-WCET job at the MCR (default)");
	transition->add_option("--scenario", ta.scenario, "rem-job scenario document")->excludes(wc);
	transition->add_option("--trace", ta.trace, "write the schedule as JSON lines");
	transition->add_flag("--gantt", ta.gantt, "print an ASCII Gantt chart");
	transition->add_flag("--json", ta.json, "machine-readable output");

	SimulateArgs sa;
	auto* sim = app.add_subcommand("simulate", "steady-state simulation of one mode");
	sim->add_option("system", sa.system, "system document")->required();
	sim->add_option("--mode", sa.mode, "mode to simulate")->required();
	sim->add_option("--horizon", sa.horizon, "periodic releases in [0, horizon)")->check(CLI::NonNegativeNumber);
	sim->add_option("--scenario", sa.scenario, "arrival scenario document");
	sim->add_option("--trace", sa.trace, "write the schedule as JSON lines");
	sim->add_flag("--gantt", sa.gantt, "print an ASCII Gantt chart");
	sim->add_flag("--json", sa.json, "machine-readable output");

	RunArgs ra;
	auto* run = app.add_subcommand("run", "multi-mode run driven by a script of mode change requests");
	run->add_option("system", ra.system, "system document")->required();
	run->add_option("--script", ra.script, "run script document")->required();
	run->add_option("--trace", ra.trace, "write the schedule as JSON lines");
	run->add_flag("--gantt", ra.gantt, "print an ASCII Gantt chart");
	run->add_flag("--json", ra.json, "machine-readable output");

	ValidateArgs va;
	auto* val = app.add_subcommand("validate", "randomized and exhaustive validation campaigns");
	val->add_option("campaign", va.campaign, "bound | predictability | sufficiency")
	    ->check(CLI::IsMember({"bound", "predictability", "sufficiency"}));
	val->add_option("--seed", va.cfg.seed, "campaign seed");
	val->add_option("--trials", va.cfg.trials, "trials (per transition for sufficiency)")->check(CLI::PositiveNumber);
	val->add_option("--n-min", va.cfg.n_range.lo, "fewest jobs per trial");
	val->add_option("--n-max", va.cfg.n_range.hi, "most jobs per trial");
	val->add_option("--m-min", va.cfg.m_range.lo, "fewest processors");
	val->add_option("--m-max", va.cfg.m_range.hi, "most processors");
	val->add_option("--p-min", va.cfg.p_range.lo, "smallest processing time");
	val->add_option("--p-max", va.cfg.p_range.hi, "largest processing time");
	val->add_option("--max-offset", va.cfg.max_offset, "release offset / jitter bound");
	val->add_option("--shrink", va.cfg.shrink_prob, "probability of shrinking a job's work")->check(CLI::Range(0.0, 1.0));
	val->add_option("--cap", va.cfg.exhaustive_cap, "largest n enumerated exhaustively");
	val->add_option("--system", va.system, "sufficiency: system document (default: generated suite)");
	val->add_option("--from", va.from, "sufficiency: old mode");
	val->add_option("--to", va.to, "sufficiency: new mode");
	val->add_option("--systems", va.systems, "sufficiency: number of generated systems");
	val->add_flag("--json", va.json, "machine-readable output");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return parse_failure;
	}

	try {
		if (*analyze)
			return cmd_analyze(analyze_path, analyze_json);
		if (*transition)
			return cmd_transition(ta);
		if (*sim)
			return cmd_simulate(sa);
		if (*run)
			return cmd_run(ra);
		if (*val)
			return cmd_validate(va);
	} catch (const io::ParseError& e) {
		std::cerr << e.what() << '\n';
		return parse_failure;
	} catch (const InvariantBreach& e) {
		std::cerr << "internal invariant breach: " << e.what() << '\n';
		return invariant_breach;
	} catch (const InvalidSystem& e) {
		std::cerr << e.what() << '\n';
		return parse_failure;
	} catch (const Error& e) {
		std::cerr << "error: " << e.what() << '\n';
		return parse_failure;
	}
	return ok;
}
