/**
 * Results CSV writing, matching the analyzer's ingestion schema exactly:
 * header `arch_id,dataset,epoch,val_accuracy,seed`, UTF-8, LF endings, one
 * row per trained epoch.
 */

import { appendFileSync, existsSync, writeFileSync } from 'fs'

export const RESULTS_HEADER = 'arch_id,dataset,epoch,val_accuracy,seed'

export interface RunRow {
  archId: string
  dataset: string
  epoch: number
  valAccuracy: number
  seed: number
}

export function formatRow(row: RunRow): string {
  if (!(row.valAccuracy >= 0 && row.valAccuracy <= 1)) {
    throw new Error(`val_accuracy ${row.valAccuracy} outside [0, 1]`)
  }
  if (!Number.isInteger(row.epoch) || row.epoch < 1) {
    throw new Error(`epoch must be a positive integer, got ${row.epoch}`)
  }
  return `${row.archId},${row.dataset},${row.epoch},${row.valAccuracy},${row.seed}`
}

/** Append one row, creating the file with its header on first use. */
export function appendResult(path: string, row: RunRow): void {
  if (!existsSync(path)) {
    writeFileSync(path, `${RESULTS_HEADER}\n`, 'utf-8')
  }
  appendFileSync(path, `${formatRow(row)}\n`, 'utf-8')
}
