#ifndef MMRT_IO_HPP
#define MMRT_IO_HPP

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmrt/analysis.hpp"
#include "mmrt/engine.hpp"
#include "mmrt/model.hpp"
#include "mmrt/protocol.hpp"
#include "mmrt/validation.hpp"

namespace mmrt::io {

	using Json = nlohmann::ordered_json;

	inline constexpr int document_version = 1;

	class ParseError : public Error {
	public:
		enum class Kind { Syntax, Schema, Semantic };

		ParseError(Kind k, std::vector<std::string> d)
		: Error(describe(k, d)), kind(k), details(std::move(d))
		{
		}

		Kind kind;
		std::vector<std::string> details;

		static std::string_view label(Kind k)
		{
			switch (k) {
			case Kind::Syntax: return "syntax error";
			case Kind::Schema: return "schema error";
			case Kind::Semantic: return "semantic error";
			}
			return "error";
		}

	private:
		static std::string describe(Kind k, const std::vector<std::string>& d)
		{
			std::string s(label(k));
			for (const auto& x : d)
				s += "\n  " + x;
			return s;
		}
	};

	// Strict reader: collects every schema problem with its JSON path.
	class Schema {
	public:
		std::vector<std::string> errors;

		void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

		bool object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
		            std::initializer_list<const char*> optional = {})
		{
			if (!j.is_object()) {
				fail(path, "expected an object");
				return false;
			}
			std::set<std::string> known;
			for (auto k : required) {
				known.insert(k);
				if (!j.contains(k))
					fail(path, std::string("missing key '") + k + "'");
			}
			for (auto k : optional)
				known.insert(k);
			for (auto it = j.begin(); it != j.end(); ++it)
				if (!known.count(it.key()))
					fail(path + "/" + it.key(), "unknown key '" + it.key() + "'");
			return true;
		}

		std::optional<Time> integer(const Json& j, const std::string& path)
		{
			if (!j.is_number_integer()) {
				fail(path, "expected an integer");
				return std::nullopt;
			}
			return j.get<Time>();
		}

		std::optional<std::string> string(const Json& j, const std::string& path)
		{
			if (!j.is_string()) {
				fail(path, "expected a string");
				return std::nullopt;
			}
			return j.get<std::string>();
		}

		bool array(const Json& j, const std::string& path)
		{
			if (!j.is_array()) {
				fail(path, "expected an array");
				return false;
			}
			return true;
		}

		// `key` of object `j`, if present.
		template<class F>
		void field(const Json& j, const std::string& path, const char* key, F&& f)
		{
			if (j.is_object() && j.contains(key))
				f(j.at(key), path + "/" + key);
		}

		void version(const Json& j, const std::string& path)
		{
			field(j, path, "version", [&](const Json& v, const std::string& p) {
				if (auto x = integer(v, p); x && *x != document_version)
					fail(p, "unsupported version " + std::to_string(*x));
			});
		}

		void throw_if_failed() const
		{
			if (!errors.empty())
				throw ParseError(ParseError::Kind::Schema, errors);
		}
	};

	inline Json parse_json_text(const std::string& text)
	{
		try {
			return Json::parse(text);
		} catch (const nlohmann::json::parse_error& e) {
			throw ParseError(ParseError::Kind::Syntax, {e.what()});
		}
	}

	inline std::string read_file(const std::string& path)
	{
		std::ifstream in(path, std::ios::binary);
		if (!in)
			throw ParseError(ParseError::Kind::Syntax, {path + ": cannot open file"});
		std::ostringstream ss;
		ss << in.rdbuf();
		return ss.str();
	}

	inline MultiModeSystem system_from_json(const Json& doc)
	{
		Schema s;
		MultiModeSystem sys;
		if (s.object(doc, "", {"version", "processors", "modes", "transitions"})) {
			s.version(doc, "");
			s.field(doc, "", "processors", [&](const Json& v, const std::string& p) {
				if (auto x = s.integer(v, p)) {
					if (*x < 1)
						s.fail(p, "must be >= 1");
					else
						sys.processors = static_cast<unsigned>(*x);
				}
			});
			s.field(doc, "", "modes", [&](const Json& v, const std::string& p) {
				if (!s.array(v, p))
					return;
				for (std::size_t k = 0; k < v.size(); ++k) {
					const auto mp = p + "/" + std::to_string(k);
					Mode mode;
					if (!s.object(v[k], mp, {"name", "policy", "tasks"}))
						continue;
					s.field(v[k], mp, "name", [&](const Json& x, const std::string& xp) {
						mode.name = s.string(x, xp).value_or("");
					});
					s.field(v[k], mp, "policy", [&](const Json& x, const std::string& xp) {
						if (auto name = s.string(x, xp)) {
							if (auto pol = policy_from_string(*name))
								mode.policy = *pol;
							else
								s.fail(xp, "policy must be one of edf, dm, fifo");
						}
					});
					s.field(v[k], mp, "tasks", [&](const Json& x, const std::string& xp) {
						if (!s.array(x, xp))
							return;
						for (std::size_t i = 0; i < x.size(); ++i) {
							const auto tp = xp + "/" + std::to_string(i);
							TaskSpec t;
							if (!s.object(x[i], tp, {"name", "wcet", "deadline", "period"}))
								continue;
							t.name = s.string(x[i].value("name", Json()), tp + "/name").value_or("");
							t.wcet = s.integer(x[i].value("wcet", Json()), tp + "/wcet").value_or(0);
							t.deadline = s.integer(x[i].value("deadline", Json()), tp + "/deadline").value_or(0);
							t.min_interarrival = s.integer(x[i].value("period", Json()), tp + "/period").value_or(0);
							mode.tasks.push_back(std::move(t));
						}
					});
					sys.modes.push_back(std::move(mode));
				}
			});
			s.field(doc, "", "transitions", [&](const Json& v, const std::string& p) {
				if (!s.array(v, p))
					return;
				for (std::size_t x = 0; x < v.size(); ++x) {
					const auto xp = p + "/" + std::to_string(x);
					TransitionSpec spec;
					if (!s.object(v[x], xp, {"from", "to", "complete", "enable_deadlines"}))
						continue;
					spec.from_mode = s.string(v[x].value("from", Json()), xp + "/from").value_or("");
					spec.to_mode = s.string(v[x].value("to", Json()), xp + "/to").value_or("");
					s.field(v[x], xp, "complete", [&](const Json& c, const std::string& cp) {
						if (!s.array(c, cp))
							return;
						for (std::size_t i = 0; i < c.size(); ++i)
							if (auto name = s.string(c[i], cp + "/" + std::to_string(i)))
								spec.complete_set.push_back(*name);
					});
					s.field(v[x], xp, "enable_deadlines", [&](const Json& e, const std::string& ep) {
						if (!e.is_object()) {
							s.fail(ep, "expected an object");
							return;
						}
						for (auto it = e.begin(); it != e.end(); ++it)
							if (auto d = s.integer(it.value(), ep + "/" + it.key()))
								spec.enablement_deadlines.push_back({it.key(), *d});
					});
					sys.transitions.push_back(std::move(spec));
				}
			});
		}
		s.throw_if_failed();

		if (auto v = validate_system(sys); !v.empty()) {
			std::vector<std::string> d;
			for (const auto& x : v)
				d.push_back(x.path + ": " + x.message + " [" + x.rule + "]");
			throw ParseError(ParseError::Kind::Semantic, d);
		}
		return sys;
	}

	inline MultiModeSystem parse_system_text(const std::string& text)
	{
		return system_from_json(parse_json_text(text));
	}

	inline MultiModeSystem parse_system(const std::string& path)
	{
		return parse_system_text(read_file(path));
	}

	inline Json system_to_json(const MultiModeSystem& sys)
	{
		Json doc;
		doc["version"] = document_version;
		doc["processors"] = sys.processors;
		doc["modes"] = Json::array();
		for (const auto& mode : sys.modes) {
			Json jm;
			jm["name"] = mode.name;
			jm["policy"] = std::string(to_string(mode.policy));
			jm["tasks"] = Json::array();
			for (const auto& t : mode.tasks)
				jm["tasks"].push_back(
				    {{"name", t.name}, {"wcet", t.wcet}, {"deadline", t.deadline}, {"period", t.min_interarrival}});
			doc["modes"].push_back(std::move(jm));
		}
		doc["transitions"] = Json::array();
		for (const auto& tr : sys.transitions) {
			Json jt;
			jt["from"] = tr.from_mode;
			jt["to"] = tr.to_mode;
			jt["complete"] = tr.complete_set;
			jt["enable_deadlines"] = Json::object();
			for (const auto& d : tr.enablement_deadlines)
				jt["enable_deadlines"][d.task] = d.deadline;
			doc["transitions"].push_back(std::move(jt));
		}
		return doc;
	}

	// {"horizon": H, "arrivals": {"task": [[arrival, exec_req], ...], ...}}
	// with an optional "version" when it is a standalone document.
	inline ArrivalScenario scenario_from_json(const Json& j, const Mode& mode, const std::string& path = "")
	{
		Schema s;
		ArrivalScenario sc;
		sc.releases.resize(mode.tasks.size());
		if (s.object(j, path, {"horizon", "arrivals"}, {"version"})) {
			s.version(j, path);
			sc.horizon = s.integer(j.value("horizon", Json()), path + "/horizon").value_or(0);
			s.field(j, path, "arrivals", [&](const Json& a, const std::string& ap) {
				if (!a.is_object()) {
					s.fail(ap, "expected an object");
					return;
				}
				for (auto it = a.begin(); it != a.end(); ++it) {
					const auto tp = ap + "/" + it.key();
					auto idx = mode.find_task(it.key());
					if (!idx) {
						s.fail(tp, "'" + it.key() + "' is not a task of " + mode.name);
						continue;
					}
					if (!s.array(it.value(), tp))
						continue;
					for (std::size_t r = 0; r < it.value().size(); ++r) {
						const auto& pair = it.value()[r];
						const auto rp = tp + "/" + std::to_string(r);
						if (!pair.is_array() || pair.size() != 2) {
							s.fail(rp, "expected [arrival, exec_req]");
							continue;
						}
						auto at = s.integer(pair[0], rp + "/0");
						auto c = s.integer(pair[1], rp + "/1");
						if (at && c)
							sc.releases[*idx].push_back({*at, *c});
					}
				}
			});
		}
		s.throw_if_failed();
		if (auto v = validate_scenario(mode, sc); !v.empty()) {
			std::vector<std::string> d;
			for (const auto& x : v)
				d.push_back(path + x.path + ": " + x.message);
			throw ParseError(ParseError::Kind::Semantic, d);
		}
		return sc;
	}

	inline Json scenario_to_json(const ArrivalScenario& sc, const Mode& mode)
	{
		Json j;
		j["horizon"] = sc.horizon;
		j["arrivals"] = Json::object();
		for (std::size_t i = 0; i < mode.tasks.size() && i < sc.releases.size(); ++i) {
			Json list = Json::array();
			for (const auto& r : sc.releases[i])
				list.push_back({r.arrival, r.exec_req});
			j["arrivals"][mode.tasks[i].name] = std::move(list);
		}
		return j;
	}

	struct RemJobScenario {
		Time t_mcr = 0;
		std::vector<JobInstance> rem_jobs;
	};

	// {"version": 1, "t_mcr": T, "remjobs": [{"task", "arrival", "remaining"}]}
	// Deadlines follow the task: arrival + D.
	inline RemJobScenario remjobs_from_json(const Json& j, const MultiModeSystem& sys,
	                                        std::string_view from)
	{
		Schema s;
		RemJobScenario out;
		const auto mode_idx = sys.find_mode(from);
		if (!mode_idx)
			throw Error("no such mode: " + std::string(from));
		const auto& mode = sys.modes[*mode_idx];
		if (s.object(j, "", {"version", "t_mcr", "remjobs"})) {
			s.version(j, "");
			out.t_mcr = s.integer(j.value("t_mcr", Json()), "/t_mcr").value_or(0);
			s.field(j, "", "remjobs", [&](const Json& a, const std::string& ap) {
				if (!s.array(a, ap))
					return;
				for (std::size_t r = 0; r < a.size(); ++r) {
					const auto rp = ap + "/" + std::to_string(r);
					if (!s.object(a[r], rp, {"task", "arrival", "remaining"}))
						continue;
					auto task = s.string(a[r].value("task", Json()), rp + "/task");
					auto at = s.integer(a[r].value("arrival", Json()), rp + "/arrival");
					auto rem = s.integer(a[r].value("remaining", Json()), rp + "/remaining");
					if (!task || !at || !rem)
						continue;
					auto idx = mode.find_task(*task);
					if (!idx) {
						s.fail(rp + "/task", "'" + *task + "' is not a task of " + mode.name);
						continue;
					}
					const auto& t = mode.tasks[*idx];
					if (*rem < 0 || *rem > t.wcet)
						s.fail(rp + "/remaining", "must lie in [0, wcet]");
					JobInstance job;
					job.id = mode.name + "." + t.name + ".r";
					job.task = t.name;
					job.key = {*mode_idx, *idx, 0};
					job.arrival = *at;
					job.exec_req = *rem;
					job.abs_deadline = *at + t.deadline;
					job.rel_deadline = t.deadline;
					out.rem_jobs.push_back(std::move(job));
				}
			});
		}
		s.throw_if_failed();
		return out;
	}

	struct RunScript {
		std::string initial_mode;
		Time horizon = 0;
		std::vector<MCREvent> mcrs;
		std::map<std::string, ArrivalScenario> scenarios;
	};

	// {"version": 1, "initial_mode": "A", "horizon": H,
	//  "mcrs": [{"time": t, "target": "B"}], "scenarios": {"A": {...}}}
	// Modes without a scenario get periodic releases over `horizon`.
	inline RunScript script_from_json(const Json& j, const MultiModeSystem& sys)
	{
		Schema s;
		RunScript out;
		if (s.object(j, "", {"version", "initial_mode", "horizon", "mcrs"}, {"scenarios"})) {
			s.version(j, "");
			out.initial_mode = s.string(j.value("initial_mode", Json()), "/initial_mode").value_or("");
			out.horizon = s.integer(j.value("horizon", Json()), "/horizon").value_or(0);
			if (!sys.find_mode(out.initial_mode))
				s.fail("/initial_mode", "unknown mode '" + out.initial_mode + "'");
			s.field(j, "", "mcrs", [&](const Json& a, const std::string& ap) {
				if (!s.array(a, ap))
					return;
				for (std::size_t r = 0; r < a.size(); ++r) {
					const auto rp = ap + "/" + std::to_string(r);
					if (!s.object(a[r], rp, {"time", "target"}))
						continue;
					auto t = s.integer(a[r].value("time", Json()), rp + "/time");
					auto target = s.string(a[r].value("target", Json()), rp + "/target");
					if (t && target)
						out.mcrs.push_back({*t, *target});
				}
			});
		}
		s.throw_if_failed();
		if (j.contains("scenarios")) {
			const auto& sc = j.at("scenarios");
			if (!sc.is_object())
				throw ParseError(ParseError::Kind::Schema, {"/scenarios: expected an object"});
			for (auto it = sc.begin(); it != sc.end(); ++it) {
				auto idx = sys.find_mode(it.key());
				if (!idx)
					throw ParseError(ParseError::Kind::Schema,
					                 {"/scenarios/" + it.key() + ": unknown mode '" + it.key() + "'"});
				out.scenarios[it.key()] =
				    scenario_from_json(it.value(), sys.modes[*idx], "/scenarios/" + it.key());
			}
		}
		for (const auto& mode : sys.modes)
			if (!out.scenarios.count(mode.name))
				out.scenarios[mode.name] = periodic_scenario(mode, out.horizon);
		return out;
	}

	// ---- traces (JSON lines) ----

	struct PhaseSpan {
		std::string kind; // "steady" | "transition"
		std::string mode; // steady
		std::string from; // transition
		std::string to;
		Time t0 = 0;
		Time t1 = 0;

		bool operator==(const PhaseSpan&) const = default;
	};

	struct TraceDocument {
		Json meta = Json::object();
		std::vector<PhaseSpan> phases;
		ScheduleTrace trace;
	};

	inline PhaseSpan phase_span(const PhaseRecord& ph)
	{
		PhaseSpan s;
		s.t0 = ph.start;
		s.t1 = ph.end;
		if (const auto* st = std::get_if<SteadyPhase>(&ph.phase)) {
			s.kind = "steady";
			s.mode = st->mode;
		} else {
			const auto& tr = std::get<TransitionPhase>(ph.phase);
			s.kind = "transition";
			s.from = tr.from;
			s.to = tr.to;
		}
		return s;
	}

	inline TraceDocument trace_document(const FullRunTrace& run, Json meta = Json::object())
	{
		TraceDocument doc;
		doc.meta = std::move(meta);
		for (const auto& ph : run.phases)
			doc.phases.push_back(phase_span(ph));
		doc.trace = run.combined();
		return doc;
	}

	// Header line, then phase, slice and event records ordered by time.
	// At equal times phases come first, then events, then slices; each
	// category keeps its original order.
	inline void write_trace(std::ostream& out, const TraceDocument& doc)
	{
		const auto& tr = doc.trace;
		Json header;
		header["type"] = "header";
		header["version"] = document_version;
		header["m"] = tr.processors;
		header["start"] = tr.start;
		header["end"] = tr.end;
		header["meta"] = doc.meta;
		out << header.dump() << '\n';

		struct Rec {
			Time t;
			int cat;
			std::size_t seq;
			Json j;
		};
		std::vector<Rec> recs;
		for (std::size_t i = 0; i < doc.phases.size(); ++i) {
			const auto& p = doc.phases[i];
			Json j;
			j["type"] = "phase";
			j["kind"] = p.kind;
			if (p.kind == "steady") {
				j["mode"] = p.mode;
			} else {
				j["from"] = p.from;
				j["to"] = p.to;
			}
			j["t0"] = p.t0;
			j["t1"] = p.t1;
			recs.push_back({p.t0, 0, i, std::move(j)});
		}
		for (std::size_t i = 0; i < tr.events.size(); ++i) {
			const auto& e = tr.events[i];
			Json j{{"t", e.time}, {"ev", std::string(to_string(e.kind))}, {"job", e.job}};
			if (e.cpu)
				j["cpu"] = e.cpu;
			recs.push_back({e.time, 1, i, std::move(j)});
		}
		for (std::size_t i = 0; i < tr.slices.size(); ++i) {
			const auto& s = tr.slices[i];
			recs.push_back({s.start, 2, i, Json{{"t0", s.start}, {"t1", s.end}, {"cpu", s.cpu}, {"job", s.job}}});
		}
		std::stable_sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
			if (a.t != b.t) return a.t < b.t;
			if (a.cat != b.cat) return a.cat < b.cat;
			return a.seq < b.seq;
		});
		for (const auto& r : recs)
			out << r.j.dump() << '\n';
	}

	inline std::string trace_to_string(const TraceDocument& doc)
	{
		std::ostringstream ss;
		write_trace(ss, doc);
		return ss.str();
	}

	inline TraceDocument read_trace(std::istream& in)
	{
		TraceDocument doc;
		std::string line;
		std::size_t lineno = 0;
		bool have_header = false;
		while (std::getline(in, line)) {
			++lineno;
			if (line.empty())
				continue;
			const auto where = "line " + std::to_string(lineno);
			Json j;
			try {
				j = Json::parse(line);
			} catch (const nlohmann::json::parse_error& e) {
				throw ParseError(ParseError::Kind::Syntax, {where + ": " + e.what()});
			}
			Schema s;
			if (!have_header) {
				if (s.object(j, where, {"type", "version", "m", "start", "end", "meta"})
				    && j.value("type", "") == "header") {
					s.version(j, where);
					doc.trace.processors = static_cast<unsigned>(s.integer(j["m"], where + "/m").value_or(1));
					doc.trace.start = s.integer(j["start"], where + "/start").value_or(0);
					doc.trace.end = s.integer(j["end"], where + "/end").value_or(0);
					doc.meta = j["meta"];
				} else {
					s.fail(where, "first record must be the header");
				}
				s.throw_if_failed();
				have_header = true;
				continue;
			}
			if (!j.is_object()) {
				s.fail(where, "expected an object");
			} else if (j.contains("type")) {
				PhaseSpan p;
				if (s.object(j, where, {"type", "kind", "t0", "t1"}, {"mode", "from", "to"})) {
					p.kind = s.string(j["kind"], where + "/kind").value_or("");
					if (p.kind == "steady")
						p.mode = s.string(j.value("mode", Json()), where + "/mode").value_or("");
					else if (p.kind == "transition") {
						p.from = s.string(j.value("from", Json()), where + "/from").value_or("");
						p.to = s.string(j.value("to", Json()), where + "/to").value_or("");
					} else
						s.fail(where + "/kind", "unknown phase kind");
					p.t0 = s.integer(j["t0"], where + "/t0").value_or(0);
					p.t1 = s.integer(j["t1"], where + "/t1").value_or(0);
				}
				doc.phases.push_back(std::move(p));
			} else if (j.contains("ev")) {
				TraceEvent e;
				if (s.object(j, where, {"t", "ev", "job"}, {"cpu"})) {
					e.time = s.integer(j["t"], where + "/t").value_or(0);
					auto kind = event_kind_from_string(s.string(j["ev"], where + "/ev").value_or(""));
					if (!kind)
						s.fail(where + "/ev", "unknown event kind");
					e.kind = kind.value_or(EventKind::Arrival);
					e.job = s.string(j["job"], where + "/job").value_or("");
					if (j.contains("cpu"))
						e.cpu = static_cast<unsigned>(s.integer(j["cpu"], where + "/cpu").value_or(0));
				}
				if (e.kind == EventKind::Completion)
					doc.trace.completions[e.job] = e.time;
				doc.trace.events.push_back(std::move(e));
			} else {
				Slice sl;
				if (s.object(j, where, {"t0", "t1", "cpu", "job"})) {
					sl.start = s.integer(j["t0"], where + "/t0").value_or(0);
					sl.end = s.integer(j["t1"], where + "/t1").value_or(0);
					sl.cpu = static_cast<unsigned>(s.integer(j["cpu"], where + "/cpu").value_or(0));
					sl.job = s.string(j["job"], where + "/job").value_or("");
				}
				doc.trace.slices.push_back(std::move(sl));
			}
			s.throw_if_failed();
		}
		if (!have_header)
			throw ParseError(ParseError::Kind::Schema, {"trace has no header record"});
		return doc;
	}

	inline TraceDocument trace_from_string(const std::string& text)
	{
		std::istringstream ss(text);
		return read_trace(ss);
	}

	// ---- reports ----

	inline Json to_json(const JobSetSummary& js)
	{
		return Json{{"n", js.n}, {"p_max", js.p_max}, {"total", js.total}, {"processing_times", js.processing_times}};
	}

	inline Json to_json(const TransitionReport& r)
	{
		return Json{{"from", r.from},
		            {"to", r.to},
		            {"upms", to_string(r.upms_value)},
		            {"upms_decimal", to_double(r.upms_value)},
		            {"min_enable_deadline", r.min_enable_deadline},
		            {"satisfied", r.satisfied},
		            {"jobset", to_json(r.worst_case_jobset)}};
	}

	inline Json analysis_json(const std::vector<TransitionReport>& reports)
	{
		Json arr = Json::array();
		for (const auto& r : reports)
			arr.push_back(to_json(r));
		return Json{{"satisfied", all_satisfied(reports)}, {"transitions", std::move(arr)}};
	}

	inline Json to_json(const DeadlineReport& r)
	{
		Json jobs = Json::array();
		for (const auto& v : r.jobs) {
			Json j{{"job", v.job}, {"deadline", v.deadline}};
			j["completion"] = v.completion ? Json(*v.completion) : Json(nullptr);
			j["met"] = v.met;
			jobs.push_back(std::move(j));
		}
		return Json{{"all_met", r.all_met}, {"misses", r.misses()}, {"jobs", std::move(jobs)}};
	}

	inline Json to_json(const TransitionTrace& tt, unsigned m)
	{
		std::vector<Time> work;
		for (const auto& j : tt.rem_jobs)
			work.push_back(j.exec_req);
		const auto bound = upms(work, m);
		Json rem = Json::array();
		for (const auto& j : tt.rem_jobs)
			rem.push_back({{"job", j.id},
			               {"task", j.task},
			               {"arrival", j.arrival},
			               {"remaining", j.exec_req},
			               {"deadline", j.abs_deadline ? Json(*j.abs_deadline) : Json(nullptr)}});
		Json en = Json::array();
		for (const auto& e : tt.enablement)
			en.push_back({{"task", e.task}, {"deadline", e.deadline}, {"enabled_at", e.enabled_at}, {"met", e.met}});
		return Json{{"from", tt.from},
		            {"to", tt.to},
		            {"t_mcr", tt.t_mcr},
		            {"t_enable", tt.t_enable},
		            {"delay", tt.delay()},
		            {"delay_bound", to_string(bound)},
		            {"aborted", tt.aborted_jobs},
		            {"rem_jobs", std::move(rem)},
		            {"enablement", std::move(en)},
		            {"enablement_met", tt.enablement_met()},
		            {"remjob_deadlines", to_json(tt.remjob_deadlines)}};
	}

	inline Json to_json(const FullRunTrace& run)
	{
		Json phases = Json::array();
		for (const auto& ph : run.phases) {
			const auto s = phase_span(ph);
			Json j{{"kind", s.kind}};
			if (s.kind == "steady")
				j["mode"] = s.mode;
			else {
				j["from"] = s.from;
				j["to"] = s.to;
			}
			j["t0"] = s.t0;
			j["t1"] = s.t1;
			phases.push_back(std::move(j));
		}
		Json trans = Json::array();
		for (const auto& tt : run.transitions)
			trans.push_back(to_json(tt, run.processors));
		return Json{{"all_met", run.all_met()},
		            {"enablement_met", run.enablement_met},
		            {"phases", std::move(phases)},
		            {"transitions", std::move(trans)},
		            {"job_deadlines", to_json(run.job_deadlines)}};
	}

	inline Json to_json(const CampaignSummary& c)
	{
		Json failed = Json::array();
		for (const auto& f : c.failed)
			failed.push_back({{"trial", f.trial}, {"seed", f.seed}, {"what", f.what}});
		return Json{{"campaign", c.name},
		            {"trials", c.trials},
		            {"checks", c.checks},
		            {"failures", c.failures},
		            {"malformed_traces", c.malformed},
		            {"failed", std::move(failed)}};
	}

	// ---- ASCII Gantt ----

	// One row per processor; each job gets a letter (legend below the chart).
	// Spans longer than `width` ticks are scaled down; a cell shows the job
	// occupying the start of its time span.
	inline std::string render_gantt(const ScheduleTrace& tr, std::size_t width = 80)
	{
		std::ostringstream out;
		const Time span = tr.end - tr.start;
		if (span <= 0) {
			out << "(empty schedule at t=" << tr.start << ")\n";
			return out.str();
		}
		const Time scale = (span + static_cast<Time>(width) - 1) / static_cast<Time>(width);
		const auto cols = static_cast<std::size_t>((span + scale - 1) / scale);

		static constexpr std::string_view symbols =
		    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
		std::map<std::string, char> sym;
		std::vector<std::string> legend;
		for (const auto& s : tr.slices)
			if (!sym.count(s.job)) {
				const auto k = legend.size();
				sym[s.job] = k < symbols.size() ? symbols[k] : '#';
				legend.push_back(s.job);
			}

		std::vector<std::string> rows(tr.processors, std::string(cols, '.'));
		for (const auto& s : tr.slices) {
			if (s.cpu < 1 || s.cpu > tr.processors)
				continue;
			for (std::size_t c = 0; c < cols; ++c) {
				const Time t = tr.start + static_cast<Time>(c) * scale;
				if (s.start <= t && t < s.end)
					rows[s.cpu - 1][c] = sym[s.job];
			}
		}
		out << "t=" << tr.start << " .. " << tr.end;
		if (scale > 1)
			out << " (1 column = " << scale << " ticks)";
		out << '\n';
		for (unsigned p = 0; p < tr.processors; ++p)
			out << "P" << (p + 1) << " |" << rows[p] << "|\n";
		for (const auto& job : legend)
			out << "  " << sym[job] << " = " << job << '\n';
		return out.str();
	}

} // namespace mmrt::io

#endif
