// Regenerates the synthetic corpora shipped under data/synthetic/.

#include <cstdio>
#include <string>

#include "seqlab/conll.hpp"
#include "seqlab/synthetic.hpp"

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data/synthetic";
  using namespace seqlab;

  // Overfit corpus: 50 sentences, 5 tags, stems all in-vocabulary.
  write_conll(dir + "/suffix_train.conll",
              synthetic::suffix_rule_corpus(50, 11, 0, 10));

  // Ablation corpus: suffix rules plus context-dependent ambiguity; the
  // validation half draws stems from a range overlapping the training pool,
  // so roughly half its content words are unseen.
  write_conll(dir + "/mixed_train.conll", synthetic::mixed_corpus(36, 12, 21, 0, 10));
  write_conll(dir + "/mixed_valid.conll", synthetic::mixed_corpus(14, 5, 22, 5, 15));

  std::printf("wrote suffix_train.conll, mixed_train.conll, mixed_valid.conll in %s\n",
              dir.c_str());
  return 0;
}
