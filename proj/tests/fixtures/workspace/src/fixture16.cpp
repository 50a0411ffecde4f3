long long totalPayload(unsigned short frames) {
    long long total = 0;
    for (unsigned short i = 0; i < frames; i = i + 1) {
        total = total + 100000;
    }
    return total;
}

void shipPayload(unsigned short frames) {
    long long payload = totalPayload(frames);
    int units = payload;
    long long carry = units;
    carry = carry + 16;
}
