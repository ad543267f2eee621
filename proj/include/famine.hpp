#pragma once

#include "famine/catalog.hpp"
#include "famine/categorize.hpp"
#include "famine/config.hpp"
#include "famine/csv.hpp"
#include "famine/dataset.hpp"
#include "famine/error.hpp"
#include "famine/evaluate.hpp"
#include "famine/models/boosting.hpp"
#include "famine/models/forest.hpp"
#include "famine/models/linear.hpp"
#include "famine/models/model.hpp"
#include "famine/models/tree.hpp"
#include "famine/numeric.hpp"
#include "famine/parallel.hpp"
#include "famine/pipeline.hpp"
#include "famine/prepare.hpp"
#include "famine/report.hpp"
#include "famine/rng.hpp"
#include "famine/svg.hpp"
#include "famine/synthetic.hpp"
#include "famine/validate.hpp"
