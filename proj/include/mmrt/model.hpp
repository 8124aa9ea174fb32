#ifndef MMRT_MODEL_HPP
#define MMRT_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmrt/time.hpp"

namespace mmrt {

	class Error : public std::runtime_error {
	public:
		using std::runtime_error::runtime_error;
	};

	enum class Policy { EDF, DM, FIFO };

	inline std::string_view to_string(Policy p)
	{
		switch (p) {
		case Policy::EDF: return "edf";
		case Policy::DM: return "dm";
		case Policy::FIFO: return "fifo";
		}
		return "?";
	}

	inline std::optional<Policy> policy_from_string(std::string_view s)
	{
		if (s == "edf") return Policy::EDF;
		if (s == "dm") return Policy::DM;
		if (s == "fifo") return Policy::FIFO;
		return std::nullopt;
	}

	// Sporadic task (C, D, T) of one mode.
	struct TaskSpec {
		std::string name;
		Time wcet = 1;
		Time deadline = 1;
		Time min_interarrival = 1;
	};

	struct Mode {
		std::string name;
		std::vector<TaskSpec> tasks;
		Policy policy = Policy::EDF;

		std::optional<std::size_t> find_task(std::string_view task) const
		{
			for (std::size_t i = 0; i < tasks.size(); ++i)
				if (tasks[i].name == task)
					return i;
			return std::nullopt;
		}
	};

	// Enablement deadline of one new-mode task, relative to the MCR instant.
	struct EnableDeadline {
		std::string task;
		Time deadline = 0;
	};

	struct TransitionSpec {
		std::string from_mode;
		std::string to_mode;
		// tasks of from_mode whose last released job must complete
		std::vector<std::string> complete_set;
		std::vector<EnableDeadline> enablement_deadlines;

		bool must_complete(std::string_view task) const
		{
			return std::find(complete_set.begin(), complete_set.end(), task)
			       != complete_set.end();
		}
	};

	struct MultiModeSystem {
		unsigned int processors = 1;
		std::vector<Mode> modes;
		std::vector<TransitionSpec> transitions;

		std::optional<std::size_t> find_mode(std::string_view name) const
		{
			for (std::size_t i = 0; i < modes.size(); ++i)
				if (modes[i].name == name)
					return i;
			return std::nullopt;
		}

		const Mode& mode(std::string_view name) const
		{
			auto idx = find_mode(name);
			if (!idx)
				throw Error("no such mode: " + std::string(name));
			return modes[*idx];
		}

		const TransitionSpec* find_transition(std::string_view from, std::string_view to) const
		{
			for (const auto& t : transitions)
				if (t.from_mode == from && t.to_mode == to)
					return &t;
			return nullptr;
		}

		const TransitionSpec& transition(std::string_view from, std::string_view to) const
		{
			if (auto t = find_transition(from, to))
				return *t;
			throw Error("no such transition: " + std::string(from) + " -> " + std::string(to));
		}
	};

	// Lexicographic tie-breaking key of a job: (mode index, task index, job index).
	struct JobKey {
		std::size_t mode = 0;
		std::size_t task = 0;
		std::size_t index = 0;

		auto operator<=>(const JobKey&) const = default;
	};

	struct JobInstance {
		std::string id;
		std::string task;
		JobKey key;
		Time arrival = 0;
		Time exec_req = 0;
		// NONE for enablement-only bookkeeping
		std::optional<Time> abs_deadline;
		// relative deadline of the generating task (DM priority)
		Time rel_deadline = 0;
	};

	struct Release {
		Time arrival = 0;
		Time exec_req = 0;

		bool operator==(const Release&) const = default;
	};

	// Per-task releases of one mode; times are relative to the mode's activation.
	struct ArrivalScenario {
		std::vector<std::vector<Release>> releases; // indexed like Mode::tasks
		Time horizon = 0;
	};

	struct MCREvent {
		Time time = 0;
		std::string target_mode;
	};

	// A broken invariant. `path` points into the system document layout
	// (e.g. "/modes/0/tasks/1/deadline").
	struct Violation {
		std::string path;
		std::string rule;
		std::string message;

		bool operator==(const Violation&) const = default;
	};

	inline std::string task_path(std::size_t mode, std::size_t task)
	{
		return "/modes/" + std::to_string(mode) + "/tasks/" + std::to_string(task);
	}

	inline std::vector<Violation> validate_system(const MultiModeSystem& sys)
	{
		std::vector<Violation> out;
		auto add = [&](std::string path, std::string rule, std::string msg) {
			out.push_back({std::move(path), std::move(rule), std::move(msg)});
		};

		if (sys.processors < 1)
			add("/processors", "m >= 1", "platform needs at least one processor");
		if (sys.modes.empty())
			add("/modes", "modes non-empty", "system has no modes");

		std::set<std::string> mode_names;
		for (std::size_t k = 0; k < sys.modes.size(); ++k) {
			const auto& mode = sys.modes[k];
			const auto mp = "/modes/" + std::to_string(k);
			if (!mode_names.insert(mode.name).second)
				add(mp + "/name", "unique mode names", "duplicate mode '" + mode.name + "'");
			if (mode.tasks.empty())
				add(mp + "/tasks", "tasks non-empty", "mode '" + mode.name + "' has no tasks");

			std::set<std::string> task_names;
			for (std::size_t i = 0; i < mode.tasks.size(); ++i) {
				const auto& t = mode.tasks[i];
				const auto tp = task_path(k, i);
				const auto who = mode.name + "." + t.name;
				if (!task_names.insert(t.name).second)
					add(tp + "/name", "unique task names", "duplicate task '" + who + "'");
				if (t.wcet < 1)
					add(tp + "/wcet", "C >= 1", who + ": wcet " + std::to_string(t.wcet) + " < 1");
				if (t.deadline < t.wcet)
					add(tp + "/deadline", "D >= C",
					    who + ": deadline " + std::to_string(t.deadline) + " < wcet "
					        + std::to_string(t.wcet));
				if (t.deadline > t.min_interarrival)
					add(tp + "/deadline", "D <= T",
					    who + ": deadline " + std::to_string(t.deadline) + " > period "
					        + std::to_string(t.min_interarrival));
			}
		}

		std::set<std::pair<std::string, std::string>> pairs;
		for (std::size_t x = 0; x < sys.transitions.size(); ++x) {
			const auto& tr = sys.transitions[x];
			const auto xp = "/transitions/" + std::to_string(x);
			const auto label = tr.from_mode + " -> " + tr.to_mode;
			auto from = sys.find_mode(tr.from_mode);
			auto to = sys.find_mode(tr.to_mode);
			if (!from)
				add(xp + "/from", "known mode", label + ": unknown mode '" + tr.from_mode + "'");
			if (!to)
				add(xp + "/to", "known mode", label + ": unknown mode '" + tr.to_mode + "'");
			if (tr.from_mode == tr.to_mode)
				add(xp, "no self-transition", label + ": self-transitions are not allowed");
			if (!pairs.insert({tr.from_mode, tr.to_mode}).second)
				add(xp, "one spec per pair", label + ": duplicate transition");

			if (from) {
				const auto& fm = sys.modes[*from];
				std::set<std::string> seen;
				for (std::size_t c = 0; c < tr.complete_set.size(); ++c) {
					const auto& name = tr.complete_set[c];
					const auto cp = xp + "/complete/" + std::to_string(c);
					if (!fm.find_task(name))
						add(cp, "C(i,j) subset of old mode",
						    label + ": '" + name + "' is not a task of " + fm.name);
					if (!seen.insert(name).second)
						add(cp, "C(i,j) is a set", label + ": '" + name + "' listed twice");
				}
			}
			if (to) {
				const auto& tm = sys.modes[*to];
				std::set<std::string> seen;
				for (const auto& ed : tr.enablement_deadlines) {
					const auto ep = xp + "/enable_deadlines/" + ed.task;
					if (!tm.find_task(ed.task))
						add(ep, "deadline per new-mode task",
						    label + ": '" + ed.task + "' is not a task of " + tm.name);
					if (!seen.insert(ed.task).second)
						add(ep, "deadline per new-mode task", label + ": '" + ed.task + "' listed twice");
					if (ed.deadline < 0)
						add(ep, "enablement deadline >= 0",
						    label + ": negative enablement deadline for '" + ed.task + "'");
				}
				for (const auto& t : tm.tasks)
					if (!seen.count(t.name))
						add(xp + "/enable_deadlines", "deadline per new-mode task",
						    label + ": no enablement deadline for '" + t.name + "'");
			}
		}
		return out;
	}

	// Checks sporadic separation and exec_req <= wcet against the mode's tasks.
	inline std::vector<Violation> validate_scenario(const Mode& mode, const ArrivalScenario& sc)
	{
		std::vector<Violation> out;
		if (sc.releases.size() != mode.tasks.size()) {
			out.push_back({"/arrivals", "one release list per task",
			               mode.name + ": scenario has " + std::to_string(sc.releases.size())
			                   + " task entries, mode has " + std::to_string(mode.tasks.size())});
			return out;
		}
		for (std::size_t i = 0; i < mode.tasks.size(); ++i) {
			const auto& task = mode.tasks[i];
			const auto& rel = sc.releases[i];
			for (std::size_t j = 0; j < rel.size(); ++j) {
				const auto p = "/arrivals/" + task.name + "/" + std::to_string(j);
				if (rel[j].arrival < 0)
					out.push_back({p, "arrival >= 0", task.name + ": negative arrival"});
				if (rel[j].exec_req < 0 || rel[j].exec_req > task.wcet)
					out.push_back({p, "0 <= exec_req <= wcet",
					               task.name + ": exec_req " + std::to_string(rel[j].exec_req)
					                   + " outside [0, " + std::to_string(task.wcet) + "]"});
				if (j > 0 && rel[j].arrival < rel[j - 1].arrival + task.min_interarrival)
					out.push_back({p, "min inter-arrival",
					               task.name + ": arrivals " + std::to_string(rel[j - 1].arrival)
					                   + " and " + std::to_string(rel[j].arrival) + " closer than T="
					                   + std::to_string(task.min_interarrival)});
			}
		}
		return out;
	}

	// Worst case at an MCR: every task of C(from,to) releases a full-WCET job at
	// the MCR instant (time 0 here). Deadlines are measured from that instant.
	inline std::vector<JobInstance> build_worst_case_remjobs(const MultiModeSystem& sys,
	                                                         std::string_view from,
	                                                         std::string_view to)
	{
		const auto* spec = sys.find_transition(from, to);
		if (!spec)
			throw Error("no such transition: " + std::string(from) + " -> " + std::string(to));
		const auto mode_idx = *sys.find_mode(from);
		const auto& mode = sys.modes[mode_idx];

		std::vector<JobInstance> jobs;
		for (std::size_t i = 0; i < mode.tasks.size(); ++i) {
			const auto& t = mode.tasks[i];
			if (!spec->must_complete(t.name))
				continue;
			JobInstance j;
			j.id = mode.name + "." + t.name + ".1";
			j.task = t.name;
			j.key = {mode_idx, i, 1};
			j.arrival = 0;
			j.exec_req = t.wcet;
			j.abs_deadline = t.deadline;
			j.rel_deadline = t.deadline;
			jobs.push_back(std::move(j));
		}
		return jobs;
	}

	// Releases at 0, T, 2T, ... < horizon, each with exec_req = wcet.
	inline ArrivalScenario periodic_scenario(const Mode& mode, Time horizon)
	{
		ArrivalScenario sc;
		sc.horizon = horizon;
		sc.releases.resize(mode.tasks.size());
		for (std::size_t i = 0; i < mode.tasks.size(); ++i) {
			const auto& t = mode.tasks[i];
			for (Time a = 0; a < horizon; a += t.min_interarrival)
				sc.releases[i].push_back({a, t.wcet});
		}
		return sc;
	}

	// Materializes a scenario of mode `mode_idx` as jobs, shifted by `offset`.
	// Only releases with relative arrival < horizon and absolute arrival <= last_arrival are kept.
	// With `released` (one counter per task), job numbering continues from the
	// counters and they are advanced, keeping ids unique across activations.
	inline std::vector<JobInstance> scenario_jobs(const MultiModeSystem& sys, std::size_t mode_idx,
	                                              const ArrivalScenario& sc, Time offset,
	                                              std::optional<Time> last_arrival = std::nullopt,
	                                              std::vector<std::size_t>* released = nullptr)
	{
		const auto& mode = sys.modes.at(mode_idx);
		if (released)
			released->resize(mode.tasks.size(), 0);
		std::vector<JobInstance> jobs;
		for (std::size_t i = 0; i < mode.tasks.size() && i < sc.releases.size(); ++i) {
			const auto& t = mode.tasks[i];
			std::size_t k = released ? (*released)[i] : 0;
			for (const auto& r : sc.releases[i]) {
				if (r.arrival >= sc.horizon)
					break;
				const Time at = offset + r.arrival;
				if (last_arrival && at > *last_arrival)
					break;
				++k;
				JobInstance j;
				j.id = mode.name + "." + t.name + "." + std::to_string(k);
				j.task = t.name;
				j.key = {mode_idx, i, k};
				j.arrival = at;
				j.exec_req = r.exec_req;
				j.abs_deadline = at + t.deadline;
				j.rel_deadline = t.deadline;
				jobs.push_back(std::move(j));
			}
			if (released)
				(*released)[i] = k;
		}
		return jobs;
	}

} // namespace mmrt

#endif
