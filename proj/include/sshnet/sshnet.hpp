#ifndef SSHNET_SSHNET_HPP_
#define SSHNET_SSHNET_HPP_

#include "sshnet/diagnostics.hpp"
#include "sshnet/distributions.hpp"
#include "sshnet/errors.hpp"
#include "sshnet/evidence.hpp"
#include "sshnet/experiment.hpp"
#include "sshnet/gibbs.hpp"
#include "sshnet/io.hpp"
#include "sshnet/kernel.hpp"
#include "sshnet/marginal_likelihood.hpp"
#include "sshnet/netsim.hpp"
#include "sshnet/parallel.hpp"
#include "sshnet/regressors.hpp"

#endif  // SSHNET_SSHNET_HPP_
