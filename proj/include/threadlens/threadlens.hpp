#pragma once

#include "threadlens/authors.hpp"
#include "threadlens/classifiers.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/json_line.hpp"
#include "threadlens/limelight.hpp"
#include "threadlens/line_reader.hpp"
#include "threadlens/parallel.hpp"
#include "threadlens/records.hpp"
#include "threadlens/report.hpp"
#include "threadlens/stats.hpp"
#include "threadlens/synth.hpp"
#include "threadlens/table_io.hpp"
#include "threadlens/thread_tree.hpp"
