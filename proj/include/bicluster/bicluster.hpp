#pragma once

#include "bicluster/model.hpp"
#include "bicluster/diagnostics.hpp"
#include "bicluster/integrator.hpp"
#include "bicluster/stages.hpp"
#include "bicluster/oracles.hpp"
#include "bicluster/certificates.hpp"
