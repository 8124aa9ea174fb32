#ifndef MMRT_ANALYSIS_HPP
#define MMRT_ANALYSIS_HPP

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mmrt/model.hpp"
#include "mmrt/time.hpp"

namespace mmrt {

	struct JobSetSummary {
		std::vector<Time> processing_times;
		std::size_t n = 0;
		Time p_max = 0;
		Time total = 0;

		JobSetSummary() = default;

		explicit JobSetSummary(std::vector<Time> ps)
		: processing_times(std::move(ps))
		, n(processing_times.size())
		, p_max(processing_times.empty()
		            ? 0
		            : *std::max_element(processing_times.begin(), processing_times.end()))
		, total(std::accumulate(processing_times.begin(), processing_times.end(), Time{0}))
		{
		}
	};

	// Upper bound on the makespan of n jobs ready at time 0 under any global,
	// work-conserving, fixed job-priority scheduler on m identical processors:
	//   p_max                          if m >= n
	//   total/m + (1 - 1/m) * p_max    otherwise
	// m = 1 gives the exact single-processor makespan (total); no jobs gives 0.
	inline Rational upms(const JobSetSummary& js, unsigned m)
	{
		if (m < 1)
			throw Error("upms: need at least one processor");
		if (js.n == 0)
			return Rational(0);
		if (m == 1)
			return Rational(js.total);
		if (m >= js.n)
			return Rational(js.p_max);
		const Time mm = m;
		return Rational(js.total + (mm - 1) * js.p_max, mm);
	}

	inline Rational upms(std::span<const Time> ps, unsigned m)
	{
		return upms(JobSetSummary(std::vector<Time>(ps.begin(), ps.end())), m);
	}

	inline Time min_enablement_deadline(const TransitionSpec& spec)
	{
		if (spec.enablement_deadlines.empty())
			throw Error("transition " + spec.from_mode + " -> " + spec.to_mode
			            + " has no enablement deadlines");
		Time best = spec.enablement_deadlines.front().deadline;
		for (const auto& d : spec.enablement_deadlines)
			best = std::min(best, d.deadline);
		return best;
	}

	struct TransitionReport {
		std::string from;
		std::string to;
		Rational upms_value;
		Time min_enable_deadline = 0;
		bool satisfied = false;
		JobSetSummary worst_case_jobset;
	};

	// Sufficient condition: upms of the WCETs of C(from,to) must not exceed the
	// smallest enablement deadline of the new mode.
	inline TransitionReport check_transition_condition(const MultiModeSystem& sys,
	                                                   std::string_view from, std::string_view to)
	{
		const auto& spec = sys.transition(from, to);
		const auto& mode = sys.mode(from);

		std::vector<Time> wcets;
		for (const auto& t : mode.tasks)
			if (spec.must_complete(t.name))
				wcets.push_back(t.wcet);

		TransitionReport rep;
		rep.from = spec.from_mode;
		rep.to = spec.to_mode;
		rep.worst_case_jobset = JobSetSummary(std::move(wcets));
		rep.upms_value = upms(rep.worst_case_jobset, sys.processors);
		rep.min_enable_deadline = min_enablement_deadline(spec);
		rep.satisfied = rep.upms_value <= Rational(rep.min_enable_deadline);
		return rep;
	}

	class InvalidSystem : public Error {
	public:
		explicit InvalidSystem(std::vector<Violation> v)
		: Error(describe(v)), violations(std::move(v))
		{
		}

		std::vector<Violation> violations;

	private:
		static std::string describe(const std::vector<Violation>& v)
		{
			std::string s = "invalid system (" + std::to_string(v.size()) + " violation"
			                + (v.size() == 1 ? "" : "s") + ")";
			for (const auto& x : v)
				s += "\n  " + x.path + ": " + x.message + " [" + x.rule + "]";
			return s;
		}
	};

	inline void require_valid(const MultiModeSystem& sys)
	{
		if (auto v = validate_system(sys); !v.empty())
			throw InvalidSystem(std::move(v));
	}

	inline std::vector<TransitionReport> check_system(const MultiModeSystem& sys)
	{
		require_valid(sys);
		std::vector<TransitionReport> out;
		for (const auto& t : sys.transitions)
			out.push_back(check_transition_condition(sys, t.from_mode, t.to_mode));
		return out;
	}

	inline bool all_satisfied(std::span<const TransitionReport> reports)
	{
		return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.satisfied; });
	}

} // namespace mmrt

#endif
