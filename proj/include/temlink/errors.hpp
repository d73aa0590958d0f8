#pragma once

#include <stdexcept>
#include <string>

namespace temlink {

class bias_too_small : public std::runtime_error {
public:
    bias_too_small(double bias, double signal_sup)
        : std::runtime_error("encoder bias " + std::to_string(bias) +
                             " does not exceed signal bound " + std::to_string(signal_sup)),
          bias_(bias), signal_sup_(signal_sup) {}
    double bias() const noexcept { return bias_; }
    double signal_sup() const noexcept { return signal_sup_; }

private:
    double bias_;
    double signal_sup_;
};

class insufficient_pilot_spikes : public std::runtime_error {
public:
    explicit insufficient_pilot_spikes(std::size_t count)
        : std::runtime_error("need at least 2 firing times in the pilot window, got " +
                             std::to_string(count)) {}
};

class insufficient_data_anchor : public std::runtime_error {
public:
    insufficient_data_anchor()
        : std::runtime_error("no firing time precedes the data window start") {}
};

class invalid_firing_record : public std::runtime_error {
public:
    explicit invalid_firing_record(const std::string& what)
        : std::runtime_error("invalid firing record: " + what) {}
};

class rank_deficient : public std::runtime_error {
public:
    explicit rank_deficient(double condition_estimate)
        : std::runtime_error("detection system is rank deficient or ill conditioned "
                             "(condition estimate " + std::to_string(condition_estimate) + ")"),
          condition_estimate_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class search_space_too_large : public std::runtime_error {
public:
    search_space_too_large(int order, int length)
        : std::runtime_error("brute-force search over " + std::to_string(order) + "^" +
                             std::to_string(length) + " sequences exceeds the 2^20 guard") {}
};

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what)
        : std::runtime_error("config error: " + what) {}
};

} // namespace temlink
