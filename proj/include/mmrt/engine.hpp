#ifndef MMRT_ENGINE_HPP
#define MMRT_ENGINE_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mmrt/model.hpp"

namespace mmrt {

	// Strict total order over the positions of a job list; rank 0 is the
	// highest priority. Fixed once built.
	class PriorityAssignment {
	public:
		PriorityAssignment() = default;

		// `order` lists job positions from highest to lowest priority.
		explicit PriorityAssignment(std::vector<std::size_t> order)
		: order_(std::move(order)), rank_(order_.size(), npos)
		{
			for (std::size_t r = 0; r < order_.size(); ++r) {
				const auto pos = order_[r];
				if (pos >= rank_.size() || rank_[pos] != npos)
					throw Error("priority order is not a permutation");
				rank_[pos] = r;
			}
		}

		std::size_t size() const { return order_.size(); }
		std::size_t rank(std::size_t pos) const { return rank_.at(pos); }
		const std::vector<std::size_t>& order() const { return order_; }

		// true iff the job at position a has higher priority than the one at b
		bool higher(std::size_t a, std::size_t b) const { return rank_[a] < rank_[b]; }

	private:
		static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
		std::vector<std::size_t> order_;
		std::vector<std::size_t> rank_;
	};

	// EDF: absolute deadline; DM: task relative deadline; FIFO: arrival.
	// Ties fall back to (mode, task, job) keys, then list position.
	inline PriorityAssignment assign_priorities(Policy policy, std::span<const JobInstance> jobs)
	{
		constexpr Time none = std::numeric_limits<Time>::max();
		auto primary = [&](const JobInstance& j) -> Time {
			switch (policy) {
			case Policy::EDF: return j.abs_deadline.value_or(none);
			case Policy::DM: return j.rel_deadline;
			case Policy::FIFO: return j.arrival;
			}
			return 0;
		};
		std::vector<std::size_t> order(jobs.size());
		std::iota(order.begin(), order.end(), 0);
		std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
			const auto pa = primary(jobs[a]), pb = primary(jobs[b]);
			if (pa != pb) return pa < pb;
			if (jobs[a].key != jobs[b].key) return jobs[a].key < jobs[b].key;
			return a < b;
		});
		return PriorityAssignment(std::move(order));
	}

	struct Slice {
		Time start = 0;
		Time end = 0;
		unsigned cpu = 1; // 1..m
		std::string job;

		bool operator==(const Slice&) const = default;
	};

	enum class EventKind { Arrival, Completion, Preemption, IdleStart, Abort };

	inline std::string_view to_string(EventKind k)
	{
		switch (k) {
		case EventKind::Arrival: return "ARRIVAL";
		case EventKind::Completion: return "COMPLETION";
		case EventKind::Preemption: return "PREEMPTION";
		case EventKind::IdleStart: return "IDLE-START";
		case EventKind::Abort: return "ABORT";
		}
		return "?";
	}

	inline std::optional<EventKind> event_kind_from_string(std::string_view s)
	{
		for (auto k : {EventKind::Arrival, EventKind::Completion, EventKind::Preemption,
		               EventKind::IdleStart, EventKind::Abort})
			if (to_string(k) == s)
				return k;
		return std::nullopt;
	}

	struct TraceEvent {
		Time time = 0;
		EventKind kind = EventKind::Arrival;
		std::string job; // empty for IDLE-START
		unsigned cpu = 0; // 0 when no processor is involved

		bool operator==(const TraceEvent&) const = default;
	};

	struct ScheduleTrace {
		unsigned processors = 1;
		Time start = 0;
		Time end = 0;
		std::vector<Slice> slices;
		std::map<std::string, Time> completions;
		std::vector<TraceEvent> events;

		std::optional<Time> makespan() const
		{
			std::optional<Time> ms;
			for (const auto& [_, t] : completions)
				ms = ms ? std::max(*ms, t) : t;
			return ms;
		}

		bool operator==(const ScheduleTrace&) const = default;
	};

	struct SimulationRun {
		ScheduleTrace trace;
		std::vector<Time> remaining; // per job position, at trace.end
	};

	// Global preemptive work-conserving fixed job-priority scheduling on m
	// identical processors. At every instant the min(m, #pending) highest
	// priority pending jobs run. Completions at an instant are handled before
	// arrivals at the same instant. With `stop_at`, the run halts at that
	// instant after its completions and arrivals have been processed.
	inline SimulationRun simulate_until(std::span<const JobInstance> jobs,
	                                    const PriorityAssignment& prio, unsigned m,
	                                    std::optional<Time> stop_at = std::nullopt)
	{
		if (m < 1)
			throw Error("simulate: need at least one processor");
		if (prio.size() != jobs.size())
			throw Error("simulate: priority assignment does not cover the job list");

		const std::size_t n = jobs.size();
		SimulationRun run;
		auto& tr = run.trace;
		tr.processors = m;
		run.remaining.resize(n);
		for (std::size_t i = 0; i < n; ++i)
			run.remaining[i] = jobs[i].exec_req;

		std::vector<std::size_t> by_arrival(n);
		std::iota(by_arrival.begin(), by_arrival.end(), 0);
		std::stable_sort(by_arrival.begin(), by_arrival.end(), [&](std::size_t a, std::size_t b) {
			if (jobs[a].arrival != jobs[b].arrival) return jobs[a].arrival < jobs[b].arrival;
			return prio.higher(a, b);
		});

		constexpr auto idle = std::numeric_limits<std::size_t>::max();
		std::vector<std::size_t> on_cpu(m, idle);
		std::vector<Time> slice_start(m, 0);
		std::vector<char> pending(n, 0);
		std::vector<std::size_t> pending_list;

		Time t = n ? jobs[by_arrival.front()].arrival : stop_at.value_or(0);
		if (stop_at)
			t = std::min(t, *stop_at);
		tr.start = t;
		std::size_t next_arrival = 0;

		auto close_slice = [&](unsigned p, Time now) {
			if (now > slice_start[p])
				tr.slices.push_back({slice_start[p], now, p + 1, jobs[on_cpu[p]].id});
			on_cpu[p] = idle;
		};
		auto complete = [&](std::size_t j, Time now) {
			pending[j] = 0;
			tr.completions[jobs[j].id] = now;
			tr.events.push_back({now, EventKind::Completion, jobs[j].id, 0});
		};

		for (;;) {
			std::vector<char> was_busy(m);
			for (unsigned p = 0; p < m; ++p)
				was_busy[p] = on_cpu[p] != idle;

			for (unsigned p = 0; p < m; ++p) {
				const auto j = on_cpu[p];
				if (j != idle && run.remaining[j] == 0) {
					close_slice(p, t);
					complete(j, t);
				}
			}
			while (next_arrival < n && jobs[by_arrival[next_arrival]].arrival <= t) {
				const auto j = by_arrival[next_arrival++];
				tr.events.push_back({t, EventKind::Arrival, jobs[j].id, 0});
				if (run.remaining[j] == 0)
					complete(j, t);
				else
					pending[j] = 1;
			}

			if (stop_at && t >= *stop_at) {
				for (unsigned p = 0; p < m; ++p)
					if (on_cpu[p] != idle)
						close_slice(p, t);
				break;
			}

			pending_list.clear();
			for (std::size_t j = 0; j < n; ++j)
				if (pending[j])
					pending_list.push_back(j);
			const auto k = std::min<std::size_t>(m, pending_list.size());
			std::partial_sort(pending_list.begin(), pending_list.begin() + k, pending_list.end(),
			                  [&](std::size_t a, std::size_t b) { return prio.higher(a, b); });
			std::vector<char> selected(n, 0);
			for (std::size_t r = 0; r < k; ++r)
				selected[pending_list[r]] = 1;

			for (unsigned p = 0; p < m; ++p) {
				const auto j = on_cpu[p];
				if (j != idle && !selected[j]) {
					close_slice(p, t);
					tr.events.push_back({t, EventKind::Preemption, jobs[j].id, p + 1});
				}
			}
			std::vector<char> running(n, 0);
			for (unsigned p = 0; p < m; ++p)
				if (on_cpu[p] != idle)
					running[on_cpu[p]] = 1;
			for (std::size_t r = 0; r < k; ++r) {
				const auto j = pending_list[r];
				if (running[j])
					continue;
				unsigned p = 0;
				while (on_cpu[p] != idle)
					++p;
				on_cpu[p] = j;
				slice_start[p] = t;
			}
			for (unsigned p = 0; p < m; ++p)
				if (was_busy[p] && on_cpu[p] == idle)
					tr.events.push_back({t, EventKind::IdleStart, "", p + 1});

			std::optional<Time> next;
			if (next_arrival < n)
				next = jobs[by_arrival[next_arrival]].arrival;
			for (unsigned p = 0; p < m; ++p)
				if (on_cpu[p] != idle) {
					const Time done = t + run.remaining[on_cpu[p]];
					next = next ? std::min(*next, done) : done;
				}
			if (stop_at)
				next = next ? std::min(*next, *stop_at) : *stop_at;
			if (!next)
				break;

			const Time dt = *next - t;
			for (unsigned p = 0; p < m; ++p)
				if (on_cpu[p] != idle)
					run.remaining[on_cpu[p]] -= dt;
			t = *next;
		}
		tr.end = t;
		return run;
	}

	inline ScheduleTrace simulate(std::span<const JobInstance> jobs, const PriorityAssignment& prio,
	                              unsigned m)
	{
		return simulate_until(jobs, prio, m).trace;
	}

	struct DeadlineVerdict {
		std::string job;
		Time deadline = 0;
		std::optional<Time> completion; // missing: not completed in the trace
		bool met = false;
	};

	struct DeadlineReport {
		std::vector<DeadlineVerdict> jobs;
		bool all_met = true;

		std::size_t misses() const
		{
			return static_cast<std::size_t>(
			    std::count_if(jobs.begin(), jobs.end(), [](const auto& v) { return !v.met; }));
		}
	};

	// Inclusive boundary: completion == deadline is met. Jobs without a
	// deadline are skipped.
	inline DeadlineReport check_trace_deadlines(const ScheduleTrace& trace,
	                                            std::span<const JobInstance> jobs)
	{
		std::unordered_map<std::string_view, const JobInstance*> by_id;
		for (const auto& j : jobs)
			by_id.emplace(j.id, &j);
		for (const auto& [id, _] : trace.completions)
			if (!by_id.count(id))
				throw Error("unknown job: " + id);
		for (const auto& s : trace.slices)
			if (!by_id.count(s.job))
				throw Error("unknown job: " + s.job);

		DeadlineReport rep;
		for (const auto& j : jobs) {
			if (!j.abs_deadline)
				continue;
			DeadlineVerdict v;
			v.job = j.id;
			v.deadline = *j.abs_deadline;
			if (auto it = trace.completions.find(j.id); it != trace.completions.end())
				v.completion = it->second;
			v.met = v.completion && *v.completion <= v.deadline;
			rep.all_met = rep.all_met && v.met;
			rep.jobs.push_back(std::move(v));
		}
		return rep;
	}

	// Recomputes from the trace alone: (a) per-processor overlap, (b) job
	// parallelism, (c) work conservation, (d) priority rule, plus per-job work
	// accounting. Empty result means the trace is a valid schedule of `jobs`.
	inline std::vector<Violation> verify_trace_wellformed(const ScheduleTrace& trace,
	                                                      std::span<const JobInstance> jobs,
	                                                      const PriorityAssignment& prio, unsigned m)
	{
		std::vector<Violation> out;
		auto add = [&](std::string where, std::string rule, std::string msg) {
			out.push_back({std::move(where), std::move(rule), std::move(msg)});
		};
		auto at = [](Time t) { return "t=" + std::to_string(t); };

		std::unordered_map<std::string_view, std::size_t> pos;
		for (std::size_t i = 0; i < jobs.size(); ++i)
			pos.emplace(jobs[i].id, i);

		std::vector<std::vector<const Slice*>> per_cpu(m), per_job(jobs.size());
		for (const auto& s : trace.slices) {
			auto it = pos.find(s.job);
			if (it == pos.end()) {
				add(at(s.start), "known job", "slice for unknown job '" + s.job + "'");
				continue;
			}
			if (s.cpu < 1 || s.cpu > m) {
				add(at(s.start), "processor index", "slice on processor " + std::to_string(s.cpu));
				continue;
			}
			if (s.end <= s.start)
				add(at(s.start), "positive slice length", "empty slice for '" + s.job + "'");
			per_cpu[s.cpu - 1].push_back(&s);
			per_job[it->second].push_back(&s);
		}
		auto by_start = [](const Slice* a, const Slice* b) { return a->start < b->start; };

		for (unsigned p = 0; p < m; ++p) {
			auto& v = per_cpu[p];
			std::sort(v.begin(), v.end(), by_start);
			for (std::size_t i = 1; i < v.size(); ++i)
				if (v[i]->start < v[i - 1]->end)
					add(at(v[i]->start), "(a) no overlap",
					    "P" + std::to_string(p + 1) + " runs '" + v[i - 1]->job + "' and '"
					        + v[i]->job + "' at once");
		}

		std::vector<std::optional<Time>> completion(jobs.size());
		for (std::size_t i = 0; i < jobs.size(); ++i) {
			const auto& j = jobs[i];
			if (auto it = trace.completions.find(j.id); it != trace.completions.end())
				completion[i] = it->second;
			auto& v = per_job[i];
			std::sort(v.begin(), v.end(), by_start);
			Time work = 0;
			for (std::size_t k = 0; k < v.size(); ++k) {
				work += v[k]->end - v[k]->start;
				if (k > 0 && v[k]->start < v[k - 1]->end)
					add(at(v[k]->start), "(b) no job parallelism",
					    "'" + j.id + "' runs on two processors");
				if (v[k]->start < j.arrival)
					add(at(v[k]->start), "runs after arrival", "'" + j.id + "' runs before it arrives");
				if (completion[i] && v[k]->end > *completion[i])
					add(at(v[k]->end), "runs before completion", "'" + j.id + "' runs after completing");
			}
			if (completion[i]) {
				if (work != j.exec_req)
					add(j.id, "work accounting",
					    "'" + j.id + "' completed after " + std::to_string(work) + " of "
					        + std::to_string(j.exec_req) + " units");
				if (j.exec_req == 0 && *completion[i] != j.arrival)
					add(j.id, "work accounting", "zero-work job '" + j.id + "' not completed on arrival");
			} else if (work > j.exec_req) {
				add(j.id, "work accounting", "'" + j.id + "' over-executed");
			}
		}

		std::vector<Time> cuts{trace.start, trace.end};
		for (const auto& s : trace.slices)
			cuts.insert(cuts.end(), {s.start, s.end});
		for (std::size_t i = 0; i < jobs.size(); ++i) {
			cuts.push_back(jobs[i].arrival);
			if (completion[i])
				cuts.push_back(*completion[i]);
		}
		std::sort(cuts.begin(), cuts.end());
		cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

		for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
			const Time a = cuts[c], b = cuts[c + 1];
			if (a < trace.start || b > trace.end)
				continue;
			std::vector<char> running(jobs.size(), 0);
			std::size_t busy = 0;
			for (std::size_t i = 0; i < jobs.size(); ++i)
				for (const auto* s : per_job[i])
					if (s->start <= a && s->end >= b) {
						running[i] = 1;
						++busy;
						break;
					}
			std::optional<std::size_t> worst_running, best_waiting;
			for (std::size_t i = 0; i < jobs.size(); ++i) {
				const bool is_pending = jobs[i].arrival <= a && (!completion[i] || *completion[i] > a);
				if (running[i]) {
					if (!is_pending)
						add(at(a), "running implies pending", "'" + jobs[i].id + "' runs while not pending");
					if (!worst_running || prio.higher(*worst_running, i))
						worst_running = i;
				} else if (is_pending) {
					if (!best_waiting || prio.higher(i, *best_waiting))
						best_waiting = i;
				}
			}
			if (best_waiting && busy < m)
				add(at(a), "(c) work conservation",
				    "processor idle while '" + jobs[*best_waiting].id + "' is pending");
			if (best_waiting && worst_running && prio.higher(*best_waiting, *worst_running))
				add(at(a), "(d) priority rule",
				    "'" + jobs[*worst_running].id + "' runs while higher-priority '"
				        + jobs[*best_waiting].id + "' waits");
		}
		return out;
	}

} // namespace mmrt

#endif
