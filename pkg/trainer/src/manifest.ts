/**
 * Experiment manifest parsing.
 *
 * One manifest JSON document fully describes a run: the architecture
 * (template + per-slot feature counts), the dataset recipe and the
 * warm-restart schedule. Parsing is strict: unknown or missing keys fail
 * loudly rather than training a half-configured network.
 */

import { readFileSync } from 'fs'

export interface SkewParams {
  xi: number
  omega: number
  alpha: number
}

export interface ScheduleSpec {
  etaMax: number
  etaMin: number
  firstCycle: number
  cycleMult: number
  totalEpochs: number
}

export interface AugmentationSpec {
  horizontalFlip: boolean
  translatePixels: number
}

export interface Manifest {
  archId: string
  params: SkewParams
  template: string
  counts: number[]
  parameterCount: number
  dataset: 'mnist' | 'fashion_mnist' | 'cifar10'
  epochs: number
  batchSize: number
  weightDecay: number
  schedule: ScheduleSpec
  augmentation: AugmentationSpec
  resizeTo: [number, number]
  initScheme: string
  bnEpsilon: number
  seed: number
}

const TOP_KEYS = [
  'arch_id', 'params', 'template', 'counts', 'parameter_count', 'dataset',
  'epochs', 'batch_size', 'weight_decay', 'schedule', 'augmentation',
  'resize_to', 'init_scheme', 'bn_epsilon', 'seed',
]

const DATASETS = new Set(['mnist', 'fashion_mnist', 'cifar10'])

function requireKeys(doc: Record<string, unknown>, expected: string[], context: string): void {
  const missing = expected.filter((k) => !(k in doc))
  const extra = Object.keys(doc).filter((k) => !expected.includes(k))
  if (missing.length > 0 || extra.length > 0) {
    throw new Error(
      `${context}: missing keys [${missing}], unexpected keys [${extra}]`,
    )
  }
}

function asNumber(value: unknown, name: string): number {
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    throw new Error(`${name} must be a finite number, got ${JSON.stringify(value)}`)
  }
  return value
}

function asInt(value: unknown, name: string): number {
  const num = asNumber(value, name)
  if (!Number.isInteger(num)) throw new Error(`${name} must be an integer, got ${num}`)
  return num
}

export function parseManifest(text: string): Manifest {
  const doc = JSON.parse(text) as Record<string, any>
  requireKeys(doc, TOP_KEYS, 'manifest')
  requireKeys(doc.params, ['xi', 'omega', 'alpha'], 'manifest params')
  requireKeys(
    doc.schedule,
    ['eta_max', 'eta_min', 'first_cycle', 'cycle_mult'],
    'manifest schedule',
  )
  requireKeys(
    doc.augmentation,
    ['horizontal_flip', 'translate_pixels'],
    'manifest augmentation',
  )
  if (!DATASETS.has(doc.dataset)) {
    throw new Error(`unknown dataset ${JSON.stringify(doc.dataset)}`)
  }
  if (!Array.isArray(doc.counts) || doc.counts.length === 0) {
    throw new Error('counts must be a non-empty array')
  }
  if (!Array.isArray(doc.resize_to) || doc.resize_to.length !== 2) {
    throw new Error('resize_to must hold exactly two values')
  }
  const epochs = asInt(doc.epochs, 'epochs')
  if (epochs < 1) throw new Error(`epochs must be >= 1, got ${epochs}`)

  return {
    archId: String(doc.arch_id),
    params: {
      xi: asNumber(doc.params.xi, 'params.xi'),
      omega: asNumber(doc.params.omega, 'params.omega'),
      alpha: asNumber(doc.params.alpha, 'params.alpha'),
    },
    template: String(doc.template),
    counts: doc.counts.map((c: unknown, i: number) => {
      const count = asInt(c, `counts[${i}]`)
      if (count < 1) throw new Error(`counts[${i}] must be >= 1, got ${count}`)
      return count
    }),
    parameterCount: asInt(doc.parameter_count, 'parameter_count'),
    dataset: doc.dataset,
    epochs,
    batchSize: asInt(doc.batch_size, 'batch_size'),
    weightDecay: asNumber(doc.weight_decay, 'weight_decay'),
    schedule: {
      etaMax: asNumber(doc.schedule.eta_max, 'schedule.eta_max'),
      etaMin: asNumber(doc.schedule.eta_min, 'schedule.eta_min'),
      firstCycle: asInt(doc.schedule.first_cycle, 'schedule.first_cycle'),
      cycleMult: asInt(doc.schedule.cycle_mult, 'schedule.cycle_mult'),
      totalEpochs: epochs,
    },
    augmentation: {
      horizontalFlip: Boolean(doc.augmentation.horizontal_flip),
      translatePixels: asInt(doc.augmentation.translate_pixels, 'translate_pixels'),
    },
    resizeTo: [asInt(doc.resize_to[0], 'resize_to[0]'), asInt(doc.resize_to[1], 'resize_to[1]')],
    initScheme: String(doc.init_scheme),
    bnEpsilon: asNumber(doc.bn_epsilon, 'bn_epsilon'),
    seed: asInt(doc.seed, 'seed'),
  }
}

export function loadManifest(path: string): Manifest {
  return parseManifest(readFileSync(path, 'utf-8'))
}
