#include "cubeskel/rng.hpp"

#include <cmath>

namespace cubeskel {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
{
}

CounterRng::result_type CounterRng::at(std::uint64_t index) const noexcept
{
    return splitmix64(key_ ^ splitmix64(index));
}

double CounterRng::uniform() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept
{
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::int64_t CounterRng::integer(std::int64_t lo, std::int64_t hi) noexcept
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>((*this)());
    return lo + static_cast<std::int64_t>((*this)() % span);
}

CounterRng CounterRng::fork(std::uint64_t substream) const noexcept
{
    CounterRng child(0, 0);
    child.key_ = splitmix64(key_ ^ splitmix64(substream ^ 0xd1b54a32d192ed03ULL));
    return child;
}

} // namespace cubeskel
