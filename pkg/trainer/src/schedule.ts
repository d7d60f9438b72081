/**
 * Warm-restart cosine learning-rate schedule.
 *
 * Mirrors the generator's schedule math exactly: cycles of length
 * firstCycle, firstCycle*cycleMult, ... anneal from etaMax to etaMin along a
 * half cosine. Per-epoch rates must match the generator's exported table to
 * within 1e-12, so the cycle walk and the exact endpoint handling are kept
 * identical.
 */

import type { ScheduleSpec } from './manifest'

/** (start, length) of the cycle covering time t; the final instant of the
 * run belongs to the cycle it ends, interior boundaries to the next one. */
function cycleAt(spec: ScheduleSpec, t: number): [number, number] {
  let start = 0
  let length = spec.firstCycle
  while (t > start + length || (t === start + length && t < spec.totalEpochs)) {
    start += length
    length *= spec.cycleMult
  }
  return [start, length]
}

function anneal(spec: ScheduleSpec, position: number, length: number): number {
  if (position === 0) return spec.etaMax
  if (position === length) return spec.etaMin
  const span = spec.etaMax - spec.etaMin
  return spec.etaMin + 0.5 * span * (1 + Math.cos((Math.PI * position) / length))
}

/** Learning rate after t epochs; etaMax exactly at cycle starts, etaMin
 * exactly at the final instant. */
export function lrAt(spec: ScheduleSpec, t: number): number {
  if (!Number.isFinite(t) || t < 0 || t > spec.totalEpochs) {
    throw new Error(`t=${t} outside [0, ${spec.totalEpochs}]`)
  }
  const [start, length] = cycleAt(spec, t)
  return anneal(spec, t - start, length)
}

/** Cumulative cycle end epochs up to and including totalEpochs. */
export function restartBoundaries(spec: ScheduleSpec): number[] {
  const boundaries: number[] = []
  let end = 0
  let length = spec.firstCycle
  while (end + length <= spec.totalEpochs) {
    end += length
    boundaries.push(end)
    length *= spec.cycleMult
  }
  return boundaries
}

/** Start-of-epoch learning rate for every epoch of the run. */
export function epochLearningRates(spec: ScheduleSpec): number[] {
  const rates: number[] = []
  for (let epoch = 0; epoch < spec.totalEpochs; epoch++) {
    rates.push(lrAt(spec, epoch))
  }
  return rates
}
