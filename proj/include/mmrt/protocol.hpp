#ifndef MMRT_PROTOCOL_HPP
#define MMRT_PROTOCOL_HPP

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmrt/analysis.hpp"
#include "mmrt/engine.hpp"
#include "mmrt/model.hpp"

namespace mmrt {

	struct SteadyPhase {
		std::string mode;
	};

	struct TransitionPhase {
		std::string from;
		std::string to;
		Time t_mcr = 0;
	};

	using SystemPhase = std::variant<SteadyPhase, TransitionPhase>;

	struct EnablementVerdict {
		std::string task;
		Time deadline = 0; // absolute: t_mcr + D(k, from, to)
		Time enabled_at = 0;
		bool met = false;
	};

	struct TransitionTrace {
		std::string from;
		std::string to;
		Time t_mcr = 0;
		std::vector<std::string> aborted_jobs;
		// rem-jobs as released: true arrival, remaining work, original deadline
		std::vector<JobInstance> rem_jobs;
		// the same jobs made ready at t_mcr, as handed to the simulator
		std::vector<JobInstance> scheduled_jobs;
		PriorityAssignment priorities;
		ScheduleTrace rem_schedule;
		Time t_enable = 0;
		std::vector<EnablementVerdict> enablement;
		DeadlineReport remjob_deadlines;

		Time delay() const { return t_enable - t_mcr; }

		bool enablement_met() const
		{
			return std::all_of(enablement.begin(), enablement.end(),
			                   [](const auto& e) { return e.met; });
		}
	};

	struct CollectedJobs {
		std::vector<JobInstance> aborted;
		std::vector<JobInstance> rem_jobs;
	};

	// Splits the incomplete jobs of the old mode at an MCR. Jobs of tasks
	// outside C(i,j) are aborted; for each task in C(i,j) its last released
	// incomplete job becomes a rem-job (exec_req = remaining work). Older
	// incomplete jobs of the same task can only exist under overload and are
	// aborted.
	inline CollectedJobs abort_and_collect(std::span<const JobInstance> active,
	                                       const TransitionSpec& spec)
	{
		std::map<std::string, std::size_t> last;
		for (std::size_t i = 0; i < active.size(); ++i) {
			const auto& j = active[i];
			if (!spec.must_complete(j.task))
				continue;
			auto [it, fresh] = last.emplace(j.task, i);
			if (!fresh && std::pair(active[it->second].arrival, active[it->second].key)
			                  < std::pair(j.arrival, j.key))
				it->second = i;
		}
		CollectedJobs out;
		for (std::size_t i = 0; i < active.size(); ++i) {
			auto it = last.find(active[i].task);
			if (it != last.end() && it->second == i)
				out.rem_jobs.push_back(active[i]);
			else
				out.aborted.push_back(active[i]);
		}
		return out;
	}

	// Synchronous protocol: the rem-jobs keep their priorities under the old
	// mode's scheduler; every task of the new mode is enabled at the instant
	// the last rem-job completes (t_mcr if there are none).
	inline TransitionTrace run_transition(const MultiModeSystem& sys, std::string_view from,
	                                      std::string_view to, std::span<const JobInstance> remjobs,
	                                      Time t_mcr)
	{
		const auto& spec = sys.transition(from, to);
		const auto& old_mode = sys.mode(from);
		const auto& new_mode = sys.mode(to);

		std::set<std::string> seen;
		for (const auto& j : remjobs) {
			if (!spec.must_complete(j.task))
				throw Error("not a completable task: '" + j.task + "' (job " + j.id + ")");
			if (!seen.insert(j.task).second)
				throw Error("more than one rem-job for task '" + j.task + "'");
			if (j.arrival > t_mcr)
				throw Error("rem-job " + j.id + " released after the MCR");
			if (j.exec_req < 0)
				throw Error("rem-job " + j.id + " has negative remaining work");
		}

		TransitionTrace tt;
		tt.from = spec.from_mode;
		tt.to = spec.to_mode;
		tt.t_mcr = t_mcr;
		tt.rem_jobs.assign(remjobs.begin(), remjobs.end());
		tt.priorities = assign_priorities(old_mode.policy, tt.rem_jobs);
		tt.scheduled_jobs = tt.rem_jobs;
		for (auto& j : tt.scheduled_jobs)
			j.arrival = t_mcr;

		if (tt.scheduled_jobs.empty()) {
			tt.rem_schedule.processors = sys.processors;
			tt.rem_schedule.start = tt.rem_schedule.end = t_mcr;
		} else {
			tt.rem_schedule = simulate(tt.scheduled_jobs, tt.priorities, sys.processors);
		}
		tt.t_enable = tt.rem_schedule.makespan().value_or(t_mcr);
		tt.remjob_deadlines = check_trace_deadlines(tt.rem_schedule, tt.rem_jobs);

		for (const auto& task : new_mode.tasks) {
			auto d = std::find_if(spec.enablement_deadlines.begin(), spec.enablement_deadlines.end(),
			                      [&](const auto& e) { return e.task == task.name; });
			if (d == spec.enablement_deadlines.end())
				throw Error("no enablement deadline for '" + task.name + "'");
			EnablementVerdict v;
			v.task = task.name;
			v.deadline = t_mcr + d->deadline;
			v.enabled_at = tt.t_enable;
			v.met = v.enabled_at <= v.deadline;
			tt.enablement.push_back(std::move(v));
		}
		return tt;
	}

	struct PhaseRecord {
		SystemPhase phase;
		Time start = 0;
		Time end = 0;
		std::vector<JobInstance> jobs;
		PriorityAssignment priorities;
		ScheduleTrace trace;
	};

	struct FullRunTrace {
		unsigned processors = 1;
		std::vector<PhaseRecord> phases;
		std::vector<MCREvent> mcrs;
		std::vector<TransitionTrace> transitions;
		DeadlineReport job_deadlines;
		bool enablement_met = true;

		bool all_met() const { return job_deadlines.all_met && enablement_met; }

		// All phases on one time line.
		ScheduleTrace combined() const
		{
			ScheduleTrace out;
			out.processors = processors;
			if (!phases.empty()) {
				out.start = phases.front().start;
				out.end = phases.back().end;
			}
			for (const auto& ph : phases) {
				out.slices.insert(out.slices.end(), ph.trace.slices.begin(), ph.trace.slices.end());
				out.events.insert(out.events.end(), ph.trace.events.begin(), ph.trace.events.end());
				out.completions.insert(ph.trace.completions.begin(), ph.trace.completions.end());
			}
			return out;
		}
	};

	// Scenario times are relative to each activation of their mode; the
	// initial mode activates at 0 and a new mode at its transition's t_enable.
	inline FullRunTrace run_multimode(const MultiModeSystem& sys, std::string_view initial_mode,
	                                  const std::map<std::string, ArrivalScenario>& scenarios,
	                                  std::span<const MCREvent> mcrs)
	{
		require_valid(sys);
		for (std::size_t i = 1; i < mcrs.size(); ++i)
			if (mcrs[i].time <= mcrs[i - 1].time)
				throw Error("MCR times must be strictly increasing");

		auto scenario_for = [&](std::size_t mode_idx) -> const ArrivalScenario& {
			const auto& mode = sys.modes[mode_idx];
			auto it = scenarios.find(mode.name);
			if (it == scenarios.end())
				throw Error("no arrival scenario for mode " + mode.name);
			if (auto v = validate_scenario(mode, it->second); !v.empty())
				throw Error("invalid scenario for mode " + mode.name + ": " + v.front().message);
			return it->second;
		};
		auto cur = sys.find_mode(initial_mode);
		if (!cur)
			throw Error("no such mode: " + std::string(initial_mode));

		FullRunTrace run;
		run.processors = sys.processors;
		run.mcrs.assign(mcrs.begin(), mcrs.end());

		auto add_deadlines = [&](const DeadlineReport& r) {
			run.job_deadlines.jobs.insert(run.job_deadlines.jobs.end(), r.jobs.begin(), r.jobs.end());
			run.job_deadlines.all_met = run.job_deadlines.all_met && r.all_met;
		};

		std::map<std::size_t, std::vector<std::size_t>> released;
		Time t_start = 0;
		for (const auto& mcr : mcrs) {
			const auto& mode = sys.modes[*cur];
			if (mcr.time < t_start)
				throw Error("MCR during transition is out of model (t=" + std::to_string(mcr.time) + ")");
			auto target = sys.find_mode(mcr.target_mode);
			if (!target)
				throw Error("no such mode: " + mcr.target_mode);
			if (*target == *cur)
				throw Error("self-transition requested for mode " + mode.name);
			const auto& spec = sys.transition(mode.name, mcr.target_mode);

			PhaseRecord steady;
			steady.phase = SteadyPhase{mode.name};
			steady.start = t_start;
			steady.end = mcr.time;
			steady.jobs = scenario_jobs(sys, *cur, scenario_for(*cur), t_start, mcr.time, &released[*cur]);
			steady.priorities = assign_priorities(mode.policy, steady.jobs);
			auto sim = simulate_until(steady.jobs, steady.priorities, sys.processors, mcr.time);
			steady.trace = std::move(sim.trace);
			steady.trace.start = t_start;

			std::vector<JobInstance> active;
			for (std::size_t i = 0; i < steady.jobs.size(); ++i) {
				if (!steady.trace.completions.count(steady.jobs[i].id)) {
					auto j = steady.jobs[i];
					j.exec_req = sim.remaining[i];
					active.push_back(std::move(j));
				}
			}
			// jobs still pending at the MCR are judged in the transition or aborted
			auto pre = check_trace_deadlines(steady.trace, steady.jobs);
			std::erase_if(pre.jobs, [](const DeadlineVerdict& v) { return !v.completion; });
			pre.all_met = std::all_of(pre.jobs.begin(), pre.jobs.end(), [](const DeadlineVerdict& v) { return v.met; });
			add_deadlines(pre);

			auto collected = abort_and_collect(active, spec);
			auto tt = run_transition(sys, mode.name, mcr.target_mode, collected.rem_jobs, mcr.time);
			std::vector<TraceEvent> aborts;
			for (const auto& j : collected.aborted) {
				tt.aborted_jobs.push_back(j.id);
				aborts.push_back({mcr.time, EventKind::Abort, j.id, 0});
			}
			tt.rem_schedule.events.insert(tt.rem_schedule.events.begin(), aborts.begin(), aborts.end());
			add_deadlines(tt.remjob_deadlines);
			run.enablement_met = run.enablement_met && tt.enablement_met();

			PhaseRecord trans;
			trans.phase = TransitionPhase{mode.name, mcr.target_mode, mcr.time};
			trans.start = mcr.time;
			trans.end = tt.t_enable;
			trans.jobs = tt.scheduled_jobs;
			trans.priorities = tt.priorities;
			trans.trace = tt.rem_schedule;

			run.phases.push_back(std::move(steady));
			run.phases.push_back(std::move(trans));
			t_start = tt.t_enable;
			run.transitions.push_back(std::move(tt));
			cur = target;
		}

		const auto& mode = sys.modes[*cur];
		PhaseRecord last;
		last.phase = SteadyPhase{mode.name};
		last.start = t_start;
		last.jobs = scenario_jobs(sys, *cur, scenario_for(*cur), t_start, std::nullopt, &released[*cur]);
		last.priorities = assign_priorities(mode.policy, last.jobs);
		last.trace = simulate(last.jobs, last.priorities, sys.processors);
		last.trace.start = t_start;
		last.trace.end = std::max(last.trace.end, t_start);
		last.end = last.trace.end;
		add_deadlines(check_trace_deadlines(last.trace, last.jobs));
		run.phases.push_back(std::move(last));
		return run;
	}

} // namespace mmrt

#endif
