/**
 * Training loop: consume one manifest, train at configurable desk scale,
 * append one result row per epoch.
 *
 * The learning rate follows the manifest's warm-restart schedule at epoch
 * granularity (plain SGD, recreated per epoch since it carries no state);
 * weight decay enters the loss as an L2 penalty on the kernels. Horizontal
 * flip and translate-by-random-crop augmentation apply when the manifest
 * flags them.
 */

import * as tf from '@tensorflow/tfjs'
import '@tensorflow/tfjs-backend-wasm'

import { gatherBatch, loadSplit, resizeDataset, rng, shuffledIndices, subsetDataset } from './data'
import type { DigitDataset } from './data'
import { loadManifest, Manifest } from './manifest'
import { buildNetwork, kernelSquaredNorm, trainableParameterCount } from './model'
import { appendResult, RunRow } from './results'
import { epochLearningRates } from './schedule'
import { installWasmTrainingShim } from './wasm_train_shim'

/** Momentum used with the warm-restart schedule (the customary companion of
 * cosine annealing with restarts). */
export const SGD_MOMENTUM = 0.9

export interface TrainerConfig {
  manifestPath: string
  dataRoot: string
  resultsPath: string
  /** wasm is much faster for convolutions; cpu is the pure-JS fallback */
  device?: 'wasm' | 'cpu'
  /** fraction of the train and validation sets to keep, (0, 1] */
  subsetFraction?: number
  /** overrides the manifest seed when given */
  seed?: number
  /** maximum epochs actually run (defaults to the manifest's epochs) */
  maxEpochs?: number
  quiet?: boolean
}

export interface TrainOutcome {
  manifest: Manifest
  rows: RunRow[]
  /** start-of-epoch learning rate actually applied, per trained epoch */
  learningRates: number[]
  parameterCount: number
}

function augmentBatch(
  images: tf.Tensor4D, flip: boolean, translate: number, random: () => number,
): tf.Tensor4D {
  let out = images
  if (flip) {
    const mask: number[] = []
    for (let i = 0; i < images.shape[0]; i++) mask.push(random() < 0.5 ? 1 : 0)
    const flipped = tf.reverse(out, 2)
    const selector = tf.tensor1d(mask, 'bool').reshape([images.shape[0], 1, 1, 1])
    const next = tf.where(selector, flipped, out) as tf.Tensor4D
    out = next
  }
  if (translate > 0) {
    const [n, rows, cols] = [images.shape[0], images.shape[1], images.shape[2]]
    const padded = tf.pad(out, [[0, 0], [translate, translate], [translate, translate], [0, 0]])
    const dr = Math.floor(random() * (2 * translate + 1))
    const dc = Math.floor(random() * (2 * translate + 1))
    out = tf.slice(padded, [0, dr, dc, 0], [n, rows, cols, 3])
  }
  return out
}

function evaluateAccuracy(model: tf.LayersModel, ds: DigitDataset, batchSize: number): number {
  const all = new Int32Array(ds.count)
  for (let i = 0; i < ds.count; i++) all[i] = i
  let correct = 0
  for (let start = 0; start < ds.count; start += batchSize) {
    const end = Math.min(start + batchSize, ds.count)
    const batch = gatherBatch(ds, all, start, end)
    const hits = tf.tidy(() => {
      const x = tf.tensor4d(batch.images, [batch.size, ds.rows, ds.cols, 3])
      const logits = model.predict(x, { batchSize: batch.size }) as tf.Tensor2D
      const predictions = tf.argMax(logits, 1)
      const labels = tf.tensor1d(batch.labels, 'int32')
      return tf.sum(tf.cast(tf.equal(predictions, labels), 'int32')).dataSync()[0]
    })
    correct += hits
  }
  return correct / ds.count
}

export async function selectBackend(device?: 'wasm' | 'cpu'): Promise<string> {
  const wanted = device ?? 'wasm'
  const ok = await tf.setBackend(wanted)
  if (!ok && wanted !== 'cpu') {
    await tf.setBackend('cpu')
  }
  await tf.ready()
  return tf.getBackend()
}

export async function train(config: TrainerConfig): Promise<TrainOutcome> {
  const backend = await selectBackend(config.device)
  installWasmTrainingShim()

  const manifest = loadManifest(config.manifestPath)
  const seed = config.seed ?? manifest.seed
  const subset = config.subsetFraction ?? 1.0
  const log = config.quiet ? () => {} : (msg: string) => process.stderr.write(`${msg}\n`)

  const [targetRows, targetCols] = manifest.resizeTo
  const trainSet = subsetDataset(
    resizeDataset(loadSplit(config.dataRoot, 'train'), targetRows, targetCols),
    subset, seed,
  )
  const valSet = subsetDataset(
    resizeDataset(loadSplit(config.dataRoot, 'test'), targetRows, targetCols),
    subset, seed + 1,
  )
  log(
    `backend ${backend}; data: ${trainSet.count} train / ${valSet.count} val ` +
    `images at ${targetRows}x${targetCols}`,
  )

  const model = buildNetwork(manifest)
  const parameterCount = trainableParameterCount(model)
  if (parameterCount !== manifest.parameterCount) {
    throw new Error(
      `built model has ${parameterCount} trainable parameters, ` +
      `manifest declares ${manifest.parameterCount}`,
    )
  }

  const schedule = epochLearningRates(manifest.schedule)
  const epochs = Math.min(config.maxEpochs ?? manifest.epochs, manifest.epochs)
  const shuffleRandom = rng(seed ^ 0x5eed)
  const augmentRandom = rng(seed ^ 0xa06)
  const rows: RunRow[] = []
  const learningRates: number[] = []
  const optimizer = tf.train.momentum(schedule[0], SGD_MOMENTUM)

  for (let epoch = 0; epoch < epochs; epoch++) {
    const lr = schedule[epoch]
    learningRates.push(lr)
    optimizer.setLearningRate(lr)
    const order = shuffledIndices(trainSet.count, shuffleRandom)
    let lastLoss = NaN
    for (let start = 0; start < trainSet.count; start += manifest.batchSize) {
      const end = Math.min(start + manifest.batchSize, trainSet.count)
      const batch = gatherBatch(trainSet, order, start, end)
      const loss = tf.tidy(() => {
        let x = tf.tensor4d(batch.images, [batch.size, trainSet.rows, trainSet.cols, 3])
        if (manifest.augmentation.horizontalFlip || manifest.augmentation.translatePixels > 0) {
          x = augmentBatch(
            x, manifest.augmentation.horizontalFlip,
            manifest.augmentation.translatePixels, augmentRandom,
          )
        }
        const labels = tf.oneHot(tf.tensor1d(batch.labels, 'int32'), 10)
        const lossScalar = optimizer.minimize(() => {
          const logits = model.apply(x, { training: true }) as tf.Tensor2D
          const crossEntropy = tf.losses.softmaxCrossEntropy(labels, logits)
          const decay = kernelSquaredNorm(model).mul(manifest.weightDecay / 2)
          return crossEntropy.add(decay) as tf.Scalar
        }, true)
        return lossScalar!.dataSync()[0]
      })
      lastLoss = loss
      if (!Number.isFinite(loss)) {
        optimizer.dispose()
        throw new Error(
          `diverged: non-finite loss at epoch ${epoch + 1}, ` +
          `batch starting ${start} (arch ${manifest.archId})`,
        )
      }
    }

    const accuracy = evaluateAccuracy(model, valSet, manifest.batchSize)
    const row: RunRow = {
      archId: manifest.archId,
      dataset: manifest.dataset,
      epoch: epoch + 1,
      valAccuracy: accuracy,
      seed,
    }
    appendResult(config.resultsPath, row)
    rows.push(row)
    log(
      `epoch ${epoch + 1}/${epochs}: lr=${lr.toExponential(3)} ` +
      `loss=${lastLoss.toFixed(4)} val_accuracy=${accuracy.toFixed(4)}`,
    )
  }

  optimizer.dispose()
  model.dispose()
  return { manifest, rows, learningRates, parameterCount }
}
