/**
 * Client form state and the write/refresh state machine.
 *
 * Contracts implemented here:
 *  - full-form replacement: every successful response replaces the whole
 *    parsed model (no patching), mirroring the server's rebuild semantics;
 *  - serialized writes: at most one write request in flight, later writes
 *    queue behind it;
 *  - stale discard: responses superseded by a newer applied response are
 *    dropped (sequence-numbered);
 *  - 4xx errors surface inline at the offending component, network errors
 *    keep the state and offer a retry.
 */

import { FormModel, FormParseError, parseFormXml } from "./formModel.js";
import { PortalClient, PortalRequestError, ValueLiteral } from "./client.js";

export interface InlineErrorState {
  property: string;
  category: string;
  message: string;
}

export interface BannerErrorState {
  category: string;
  message: string;
}

export interface ClientFormState {
  sessionId: string;
  form: FormModel | null;
  pending: boolean;
  inlineError: InlineErrorState | null;
  bannerError: BannerErrorState | null;
  canRetry: boolean;
}

export type StateListener = (state: ClientFormState) => void;

interface PendingWrite {
  property: string;
  value: ValueLiteral;
}

export class FormController {
  private state: ClientFormState;
  private listeners: StateListener[] = [];
  private writeChain: Promise<void> = Promise.resolve();
  private sequence = 0;
  private applied = 0;
  private failedWrite: PendingWrite | null = null;

  constructor(
    private client: PortalClient,
    sessionId: string,
  ) {
    this.state = {
      sessionId,
      form: null,
      pending: false,
      inlineError: null,
      bannerError: null,
      canRetry: false,
    };
  }

  getState(): ClientFormState {
    return this.state;
  }

  subscribe(listener: StateListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<ClientFormState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  /** Replace the whole form from a server XML document, unless stale. */
  private applyXml(xml: string, seq: number): void {
    if (seq <= this.applied) return; // superseded by a newer response
    const model = parseFormXml(xml); // throws FormParseError on bad documents
    this.applied = seq;
    this.patch({ form: model, inlineError: null, bannerError: null, canRetry: false });
  }

  async refresh(): Promise<void> {
    const seq = ++this.sequence;
    this.patch({ pending: true });
    try {
      const xml = await this.client.getFormXml(this.state.sessionId);
      this.applyXml(xml, seq);
    } catch (error) {
      this.handleFailure(error, null);
    } finally {
      this.patch({ pending: false });
    }
  }

  /**
   * Queue one value write. Writes run strictly one at a time in submission
   * order; each success replaces the entire form state with the response.
   */
  submitValue(property: string, value: ValueLiteral): Promise<void> {
    const run = async (): Promise<void> => {
      const seq = ++this.sequence;
      this.patch({ pending: true });
      try {
        const xml = await this.client.postValue(this.state.sessionId, property, value);
        this.applyXml(xml, seq);
        this.failedWrite = null;
      } catch (error) {
        this.handleFailure(error, { property, value });
      } finally {
        this.patch({ pending: false });
      }
    };
    this.writeChain = this.writeChain.then(run);
    return this.writeChain;
  }

  /** Re-submit the last write that failed from a network fault. */
  retry(): Promise<void> {
    const failed = this.failedWrite;
    if (!failed) return Promise.resolve();
    this.failedWrite = null;
    return this.submitValue(failed.property, failed.value);
  }

  private handleFailure(error: unknown, write: PendingWrite | null): void {
    if (error instanceof PortalRequestError && error.status < 500) {
      // client fault: show the category inline at the component; state kept
      this.patch({
        inlineError: write
          ? { property: write.property, category: error.body.category, message: error.body.message }
          : null,
        bannerError: write ? null : { category: error.body.category, message: error.body.message },
        canRetry: false,
      });
      return;
    }
    if (error instanceof FormParseError) {
      // malformed document: previous form state is retained
      this.patch({
        bannerError: { category: "malformed-xml", message: error.message },
        canRetry: false,
      });
      return;
    }
    // network failure or server fault: keep state, offer retry
    this.failedWrite = write;
    const message = error instanceof Error ? error.message : String(error);
    this.patch({
      bannerError: { category: "network", message },
      canRetry: write !== null,
    });
  }
}
