#pragma once

// Umbrella header for the consultation-pipeline toolkit.

#include "consult/cache.hpp"
#include "consult/config.hpp"
#include "consult/corpus.hpp"
#include "consult/curation.hpp"
#include "consult/errors.hpp"
#include "consult/eval.hpp"
#include "consult/gateway.hpp"
#include "consult/ingest.hpp"
#include "consult/judge.hpp"
#include "consult/judge_http.hpp"
#include "consult/knowledge.hpp"
#include "consult/pipeline.hpp"
#include "consult/qa.hpp"
#include "consult/report.hpp"
#include "consult/sft.hpp"
#include "consult/stats.hpp"
#include "consult/style.hpp"
#include "consult/synthetic.hpp"
#include "consult/text.hpp"
