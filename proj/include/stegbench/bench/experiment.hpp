#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stegbench/bench/config.hpp"
#include "stegbench/bench/records.hpp"
#include "stegbench/bench/report.hpp"
#include "stegbench/detect/detector.hpp"
#include "stegbench/lm/ngram_model.hpp"
#include "stegbench/prompt/dataset.hpp"

namespace stegbench::bench {

// A generated dataset with its 3:1:1 split (indices into records).
struct SplitDataset {
  DatasetSpec spec;
  std::vector<Record> records;
  prompt::SplitIndices split;
};

// Everything an experiment derives before training: one LM per source and one
// split dataset per key, including the "<source>-natural" cover pools.
struct Workspace {
  std::map<std::string, lm::NGramModel> models;
  std::map<std::string, SplitDataset> datasets;
  std::map<std::string, std::vector<std::string>> lm_corpora;  // training text per source
};

// The natural dataset paired with each stego spec of a source is sized so
// that every cell can draw its covers from the matching split.
std::vector<DatasetSpec> natural_specs(const ExperimentConfig& config);

Workspace prepare_workspace(const ExperimentConfig& config);

enum class Part { Train, Valid, Test };

// Stego records of `spec` plus the same number of covers from the source's
// natural dataset for one split part. Training sets of several specs take
// consecutive cover slices, so a mix never repeats a cover.
std::vector<const Record*> cell_records(const Workspace& ws, std::span<const DatasetSpec> specs, Part part);

struct TrainedDetector {
  std::string name;
  detect::FeatureDetector detector;
};

// Fits cover statistics on the training covers and trains the detector.
TrainedDetector train_on(const Workspace& ws, const std::string& name, std::span<const DatasetSpec> specs,
                         const detect::TrainConfig& config);

std::vector<features::ScatterRecord> score_records(const detect::FeatureDetector& detector,
                                                   std::span<const Record* const> records);

metrics::ConfusionCounts tally(std::span<const features::ScatterRecord> scored);

// Runs the configured protocol and writes the run directory:
//   corpora/  <key>.txt, <key>.meta.jsonl, lm-<source>.txt
//   features/ <key>.csv, scored_<train>__<test>.csv
//   models/   lm-<source>.model, detector-<name>.txt
//   reports/  report.json, report.txt
//   exports/  errors_<train>__<test>.csv
//   prompts/  <key>/{train,valid,test}.jsonl
// Output is staged next to the target and moved into place only after every
// step succeeded. Throws IoError if the run directory already exists.
Report run_experiment(const ExperimentConfig& config);

}  // namespace stegbench::bench
