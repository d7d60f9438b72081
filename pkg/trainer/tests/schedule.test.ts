import { describe, expect, it } from 'vitest'

import type { ScheduleSpec } from '../src/manifest'
import { epochLearningRates, lrAt, restartBoundaries } from '../src/schedule'
import { featuregrid } from './helpers'

const CIFAR: ScheduleSpec = {
  etaMax: 1e-2, etaMin: 1e-5, firstCycle: 10, cycleMult: 2, totalEpochs: 150,
}

/** Parse the generator's schedule table: epoch,lr_begin,lr_end rows. */
function generatorTable(epochs: number): { begin: number; end: number }[] {
  const out = featuregrid('schedule', '--epochs', String(epochs))
  return out
    .trim()
    .split('\n')
    .slice(1)
    .filter((line) => !line.startsWith('restarts:'))
    .map((line) => {
      const [, begin, end] = line.split(',')
      return { begin: Number(begin), end: Number(end) }
    })
}

describe('warm-restart schedule parity with the generator', () => {
  it.each([150, 30, 3])('per-epoch rates match within 1e-12 (%s epochs)', (epochs) => {
    const spec: ScheduleSpec = { ...CIFAR, totalEpochs: epochs }
    const table = generatorTable(epochs)
    const rates = epochLearningRates(spec)
    expect(table).toHaveLength(epochs)
    rates.forEach((lr, epoch) => {
      expect(Math.abs(lr - table[epoch].begin)).toBeLessThanOrEqual(1e-12)
    })
  })

  it('restart boundaries match the doubling pattern', () => {
    expect(restartBoundaries(CIFAR)).toEqual([10, 30, 70, 150])
    expect(restartBoundaries({ ...CIFAR, totalEpochs: 30 })).toEqual([10, 30])
  })

  it('endpoints are exact', () => {
    expect(lrAt(CIFAR, 0)).toBe(1e-2)
    expect(lrAt(CIFAR, 150)).toBe(1e-5)
    expect(lrAt(CIFAR, 10)).toBe(1e-2) // restart instant
  })

  it('rejects times outside the run', () => {
    expect(() => lrAt(CIFAR, -1)).toThrow()
    expect(() => lrAt(CIFAR, 151)).toThrow()
  })
})
