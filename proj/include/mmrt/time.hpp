#ifndef MMRT_TIME_HPP
#define MMRT_TIME_HPP

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace mmrt {

	// Integer ticks.
	using Time = std::int64_t;

	// Exact time values produced by the makespan bound (division by m).
	using Rational = boost::rational<Time>;

	inline std::string to_string(const Rational& r)
	{
		if (r.denominator() == 1)
			return std::to_string(r.numerator());
		return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
	}

	inline double to_double(const Rational& r)
	{
		return boost::rational_cast<double>(r);
	}

} // namespace mmrt

#endif
