#pragma once

#include <string>
#include <vector>

namespace oracle {

// Brute-force sentence BLEU: nested-loop n-gram matching, product of powers instead of log sums.
long double bleu(const std::string& hypothesis, const std::string& reference);

// Two-pass Pearson in long double.
long double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Plain left-to-right mean in long double.
long double mean(const std::vector<double>& xs);

// sum over d = 0..D of k^d, by repeated addition.
std::size_t tree_size(std::size_t k, int depth);

}  // namespace oracle
