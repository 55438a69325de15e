#pragma once

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/embedding.hpp"
#include "authnet/eval.hpp"
#include "authnet/gcn.hpp"
#include "authnet/incremental.hpp"
#include "authnet/model.hpp"
#include "authnet/network.hpp"
#include "authnet/pipeline.hpp"
#include "authnet/scn.hpp"
#include "authnet/similarity.hpp"
#include "authnet/synthetic.hpp"
#include "authnet/training.hpp"
