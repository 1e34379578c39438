// Copyright 2026 The tritrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in softmax learner behind the external-learner command contract:
//   tritrain-softmax --train T.csv --pool P.csv --out predictions.csv
//                    --epochs E --seed S [--lr --l2 --batch-size]

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tritrain/common.hpp"
#include "tritrain/dataset.hpp"
#include "tritrain/learner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Softmax regression learner (external command contract)", "tritrain-softmax"};
  std::string train_path, pool_path, out_path;
  tritrain::TrainConfig cfg;
  app.add_option("--train", train_path)->required();
  app.add_option("--pool", pool_path)->required();
  app.add_option("--out", out_path)->required();
  app.add_option("--epochs", cfg.epochs);
  app.add_option("--seed", cfg.seed);
  app.add_option("--lr", cfg.learning_rate);
  app.add_option("--l2", cfg.l2);
  app.add_option("--batch-size", cfg.batch_size);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    cfg.validate();
    const tritrain::LabeledDataset train = tritrain::load_csv(train_path);
    const std::vector<tritrain::Example> pool = tritrain::load_unlabeled_csv(pool_path);
    const tritrain::SoftmaxModel model = tritrain::fit_softmax(train, cfg);
    const tritrain::PredictionSet preds = tritrain::predict(model, pool, "external");
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << tritrain::format_predictions(preds, train.alphabet());
    if (!out) throw tritrain::Error("cannot write " + out_path);
  } catch (const std::exception& e) {
    std::cerr << "tritrain-softmax: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
