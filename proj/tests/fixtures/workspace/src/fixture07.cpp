int midRange(unsigned short x) {
    return x % 100 + 50;
}

void centering(unsigned short x) {
    long long mid = midRange(x);
    int spot = mid;
    long long stay = spot;
    stay = stay + 7;
}
